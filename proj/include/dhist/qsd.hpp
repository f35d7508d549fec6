// qsd.hpp — Quantum state diffusion: stochastic pure-state unraveling of the
// Lindblad equation, with reproducible counter-based noise streams.

#pragma once

#include <dhist/lindblad.hpp>
#include <dhist/parallel.hpp>
#include <dhist/rng.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dhist {

// Complex Wiener increment for (master seed, trajectory, step, channel):
// real and imaginary parts are independent N(0, dt/2) draws, so
// E[dxi dxi*] = dt, E[dxi dxi] = 0, E[dxi] = 0.
inline Complex qsd_noise_increment(std::uint64_t master_seed, std::uint64_t trajectory,
                                   std::uint64_t step, std::uint64_t channel, double dt) {
    const auto g = normal_pair(stream_key({master_seed, trajectory, step, channel}));
    const double s = std::sqrt(0.5 * dt);
    return Complex(s * g.first, s * g.second);
}

// One Euler–Maruyama step of the nonlinear Langevin–Ito equation, followed by
// explicit renormalization. Deterministic given (psi, dt, noise).
inline StateVector qsd_step(const LindbladModel& model, const StateVector& psi, double dt,
                            std::span<const Complex> noise) {
    require(psi.dim() == model.dim(), "qsd_step: dimension mismatch");
    require(noise.size() == model.lindblads.size(), "qsd_step: one increment per lindblad");

    const Vector& v = psi.amplitudes();
    Vector dv = (Complex(0.0, -1.0) / model.hbar) * (model.hamiltonian * v) * dt;
    for (std::size_t j = 0; j < model.lindblads.size(); ++j) {
        const Matrix& l = model.lindblads[j];
        const Vector lv = l * v;
        const Complex mean_l = v.dot(lv);  // <L> (Eigen dot conjugates the left argument)
        dv += (std::conj(mean_l) * lv - 0.5 * (l.adjoint() * lv) -
               0.5 * std::norm(mean_l) * v) *
              dt;
        dv += (lv - mean_l * v) * noise[j];
    }
    Vector next = v + dv;
    const double n = next.norm();
    guard(n >= 1e-12, "qsd_step: state norm collapsed below 1e-12 before renormalization");
    return StateVector(next / n);
}

struct QsdTrajectory {
    std::uint64_t seed = 0;
    double dt = 0.0;
    std::vector<double> times;
    std::vector<StateVector> states;
};

inline QsdTrajectory qsd_trajectory(const LindbladModel& model, const StateVector& psi0,
                                    double dt, int steps, std::uint64_t master_seed,
                                    std::uint64_t trajectory_index = 0, int record_every = 1) {
    require(dt > 0.0 && steps >= 0, "qsd_trajectory: dt must be positive, steps >= 0");
    if (record_every < 1) record_every = 1;
    QsdTrajectory traj;
    traj.seed = master_seed;
    traj.dt = dt;
    traj.times.push_back(0.0);
    traj.states.push_back(psi0);

    StateVector psi = psi0;
    std::vector<Complex> noise(model.lindblads.size());
    for (int s = 1; s <= steps; ++s) {
        for (std::size_t j = 0; j < noise.size(); ++j)
            noise[j] = qsd_noise_increment(master_seed, trajectory_index,
                                           static_cast<std::uint64_t>(s), j, dt);
        psi = qsd_step(model, psi, dt, noise);
        if (s % record_every == 0 || s == steps) {
            traj.times.push_back(s * dt);
            traj.states.push_back(psi);
        }
    }
    return traj;
}

struct QsdEnsembleResult {
    std::vector<double> times;
    std::vector<Matrix> rho_mean;  // ensemble mean at each recorded time
    // observable_values[obs][record][trajectory]
    std::vector<std::string> observable_names;
    std::vector<std::vector<std::vector<double>>> observable_values;
};

// Ensemble mean rho(t) = (1/N) sum_i |psi_i(t)><psi_i(t)|. Trajectory i uses
// the noise stream (master_seed, i, step, channel); the mean is reduced over
// fixed trajectory blocks, so the result is bitwise independent of the thread
// count.
inline QsdEnsembleResult qsd_ensemble(
    const LindbladModel& model, const StateVector& psi0, double dt, int steps, int n_traj,
    std::uint64_t master_seed, int record_every = 1,
    const std::vector<std::pair<std::string, Matrix>>& observables = {}, unsigned n_threads = 1) {
    require(n_traj >= 1, "qsd_ensemble: n_traj must be >= 1");
    if (record_every < 1) record_every = 1;

    std::vector<double> times{0.0};
    for (int s = 1; s <= steps; ++s)
        if (s % record_every == 0 || s == steps) times.push_back(s * dt);
    const std::size_t n_rec = times.size();
    const Eigen::Index d = model.dim();

    const std::size_t block = kDefaultBlockSize;
    const std::size_t n_blocks = n_blocks_for(static_cast<std::size_t>(n_traj), block);
    std::vector<std::vector<Matrix>> partial(n_blocks);

    QsdEnsembleResult result;
    result.times = times;
    result.observable_names.reserve(observables.size());
    for (const auto& [name, op] : observables) {
        require(op.rows() == d && op.cols() == d, "qsd_ensemble: observable dimension mismatch");
        result.observable_names.push_back(name);
    }
    result.observable_values.assign(observables.size(),
                                    std::vector<std::vector<double>>(
                                        n_rec, std::vector<double>(static_cast<std::size_t>(n_traj))));

    parallel_blocks(static_cast<std::size_t>(n_traj), block, n_threads,
                    [&](std::size_t begin, std::size_t end, std::size_t b) {
                        std::vector<Matrix> acc(n_rec, Matrix::Zero(d, d));
                        std::vector<Complex> noise(model.lindblads.size());
                        for (std::size_t i = begin; i < end; ++i) {
                            StateVector psi = psi0;
                            std::size_t rec = 0;
                            auto record = [&](const StateVector& st) {
                                acc[rec] += st.amplitudes() * st.amplitudes().adjoint();
                                for (std::size_t o = 0; o < observables.size(); ++o)
                                    result.observable_values[o][rec][i] =
                                        (st.amplitudes().adjoint() * observables[o].second *
                                         st.amplitudes())
                                            .value()
                                            .real();
                                ++rec;
                            };
                            record(psi);
                            for (int s = 1; s <= steps; ++s) {
                                for (std::size_t j = 0; j < noise.size(); ++j)
                                    noise[j] = qsd_noise_increment(
                                        master_seed, i, static_cast<std::uint64_t>(s), j, dt);
                                psi = qsd_step(model, psi, dt, noise);
                                if (s % record_every == 0 || s == steps) record(psi);
                            }
                        }
                        partial[b] = std::move(acc);
                    });

    result.rho_mean.assign(n_rec, Matrix::Zero(d, d));
    for (std::size_t b = 0; b < n_blocks; ++b)
        for (std::size_t r = 0; r < n_rec; ++r) result.rho_mean[r] += partial[b][r];
    for (auto& m : result.rho_mean) m /= static_cast<double>(n_traj);
    return result;
}

}  // namespace dhist
