// hybrid.hpp — Coupled classical-quantum dynamics: a massive classical
// particle bilinearly coupled to a light quantum particle, in mean-field mode
// (expectation-value back-reaction, unitary quantum evolution) or stochastic
// mode (dissipative classical equation driven by a single unraveled
// trajectory).

#pragma once

#include <dhist/qsd.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace dhist {

enum class HybridMode { mean_field, stochastic };

struct HybridModel {
    double mass = 1.0;    // classical particle
    double gamma = 0.0;   // classical dissipation (stochastic mode only)
    double lambda = 0.0;  // bilinear coupling X * x
    double omega = 0.0;   // classical harmonic trap (0 = free)
    Matrix h0;            // bare quantum hamiltonian
    Matrix x_op;          // quantum position operator
    std::vector<Matrix> lindblads;  // localizing environment (stochastic mode)
    double hbar = 1.0;
    std::optional<Matrix> leak_projector;  // population guard for truncated grids
    double leak_threshold = 1e-6;

    HybridModel(double m, double g, double lam, double om, Matrix h, Matrix x,
                std::vector<Matrix> ls = {}, double hb = 1.0)
        : mass(m), gamma(g), lambda(lam), omega(om), h0(std::move(h)), x_op(std::move(x)),
          lindblads(std::move(ls)), hbar(hb) {
        require(mass > 0.0, "HybridModel: classical mass must be positive");
        require(gamma >= 0.0, "HybridModel: gamma must be nonnegative");
        require(is_hermitian(h0, 1e-10), "HybridModel: h0 not hermitian");
        require(is_hermitian(x_op, 1e-10), "HybridModel: x_op not hermitian");
        require(h0.rows() == x_op.rows(), "HybridModel: operator dimension mismatch");
    }

    double v_prime(double x) const { return mass * omega * omega * x; }
};

struct HybridResult {
    std::vector<double> times;
    std::vector<double> X;
    std::vector<double> Xdot;
    std::vector<double> xbar;  // quantum position signal fed to the classical force
    Vector final_psi;
};

// Splitting per step: the classical pair (X, Xdot) takes an RK4 substep with
// the quantum signal xbar frozen, then the quantum state advances one step
// under H_X = h0 + lambda X x with X frozen at its start-of-step value.
inline HybridResult hybrid_simulate(const HybridModel& model, double x0, double xdot0,
                                    const StateVector& psi0, double dt, int steps,
                                    std::uint64_t seed, HybridMode mode, int record_every = 1) {
    require(psi0.dim() == model.h0.rows(), "hybrid_simulate: state dimension mismatch");
    require(dt > 0.0 && steps >= 0, "hybrid_simulate: dt must be positive");
    if (record_every < 1) record_every = 1;

    const bool dissipative = (mode == HybridMode::stochastic);
    auto accel = [&](double x, double v, double xq) {
        return (-model.v_prime(x) - model.lambda * xq -
                (dissipative ? model.mass * model.gamma * v : 0.0)) /
               model.mass;
    };

    HybridResult out;
    StateVector psi = psi0;
    double X = x0;
    double V = xdot0;
    std::vector<Complex> noise(model.lindblads.size());

    auto xbar_of = [&](const StateVector& st) {
        return (st.amplitudes().adjoint() * model.x_op * st.amplitudes()).value().real();
    };
    auto record = [&](int s) {
        out.times.push_back(s * dt);
        out.X.push_back(X);
        out.Xdot.push_back(V);
        out.xbar.push_back(xbar_of(psi));
    };
    record(0);

    for (int s = 1; s <= steps; ++s) {
        const double xq = xbar_of(psi);
        const double x_frozen = X;

        // classical RK4 with frozen quantum signal
        const double k1x = V, k1v = accel(X, V, xq);
        const double k2x = V + 0.5 * dt * k1v, k2v = accel(X + 0.5 * dt * k1x, k2x, xq);
        const double k3x = V + 0.5 * dt * k2v, k3v = accel(X + 0.5 * dt * k2x, k3x, xq);
        const double k4x = V + dt * k3v, k4v = accel(X + dt * k3x, k4x, xq);
        X += (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        V += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

        const Matrix h_x = model.h0 + model.lambda * x_frozen * model.x_op;
        if (mode == HybridMode::mean_field) {
            psi = StateVector::normalized(unitary_propagator(h_x, dt, model.hbar) *
                                          psi.amplitudes());
        } else {
            const LindbladModel qmodel(h_x, model.lindblads, model.hbar);
            for (std::size_t j = 0; j < noise.size(); ++j)
                noise[j] = qsd_noise_increment(seed, 0, static_cast<std::uint64_t>(s), j, dt);
            psi = qsd_step(qmodel, psi, dt, noise);
        }

        if (model.leak_projector) {
            const double leak = (psi.amplitudes().adjoint() * (*model.leak_projector) *
                                 psi.amplitudes())
                                    .value()
                                    .real();
            guard(leak <= model.leak_threshold,
                  "hybrid_simulate: truncation leak " + std::to_string(leak));
        }
        if (s % record_every == 0 || s == steps) record(s);
    }
    out.final_psi = psi.amplitudes();
    return out;
}

}  // namespace dhist
