// lindblad.hpp — Markovian master-equation integration with a fixed 4th-order
// explicit stepper.

#pragma once

#include <dhist/operator_algebra.hpp>

#include <sstream>
#include <string>
#include <vector>

namespace dhist {

struct LindbladModel {
    Matrix hamiltonian;
    std::vector<Matrix> lindblads;
    double hbar = 1.0;

    LindbladModel(Matrix h, std::vector<Matrix> ls = {}, double hb = 1.0)
        : hamiltonian(std::move(h)), lindblads(std::move(ls)), hbar(hb) {
        require(is_hermitian(hamiltonian, 1e-10), "LindbladModel: hamiltonian not hermitian");
        require(hbar > 0.0, "LindbladModel: hbar must be positive");
        for (const auto& l : lindblads)
            require(l.rows() == hamiltonian.rows() && l.cols() == hamiltonian.cols(),
                    "LindbladModel: lindblad dimension mismatch");
    }

    Eigen::Index dim() const { return hamiltonian.rows(); }
};

// dX/dt = -(i/hbar)[H, X] - (1/2) sum_j ({L_j^dag L_j, X} - 2 L_j X L_j^dag).
// Linear in X, so it applies to the non-hermitian two-sided objects as well.
inline Matrix lindblad_generator(const LindbladModel& model, const Matrix& x) {
    Matrix out = (Complex(0.0, -1.0) / model.hbar) *
                 (model.hamiltonian * x - x * model.hamiltonian);
    for (const auto& l : model.lindblads) {
        const Matrix ldl = l.adjoint() * l;
        out += l * x * l.adjoint() - 0.5 * (ldl * x + x * ldl);
    }
    return out;
}

// Crude scale of the generator for the step-size warning.
inline double lindblad_generator_scale(const LindbladModel& model) {
    double s = 2.0 * model.hamiltonian.norm() / model.hbar;
    for (const auto& l : model.lindblads) s += 2.0 * l.squaredNorm();
    return s;
}

inline Matrix rk4_step(const LindbladModel& model, const Matrix& x, double dt) {
    const Matrix k1 = lindblad_generator(model, x);
    const Matrix k2 = lindblad_generator(model, (x + 0.5 * dt * k1).eval());
    const Matrix k3 = lindblad_generator(model, (x + 0.5 * dt * k2).eval());
    const Matrix k4 = lindblad_generator(model, (x + dt * k3).eval());
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct LindbladRun {
    std::vector<double> times;
    std::vector<DensityOperator> states;
    double max_trace_drift = 0.0;
    std::vector<std::string> warnings;
};

inline LindbladRun lindblad_evolve(const LindbladModel& model, const DensityOperator& rho0,
                                   double dt, int steps, int record_every = 1) {
    require(rho0.dim() == model.dim(), "lindblad_evolve: dimension mismatch");
    require(dt > 0.0 && steps >= 0, "lindblad_evolve: dt must be positive, steps >= 0");
    if (record_every < 1) record_every = 1;

    LindbladRun run;
    const double scale = lindblad_generator_scale(model) * dt;
    if (scale > 0.1) {
        std::ostringstream os;
        os << "lindblad_evolve: dt * generator scale = " << scale
           << " exceeds 0.1; results may be inaccurate";
        run.warnings.push_back(os.str());
    }

    Matrix x = rho0.matrix();
    run.times.push_back(0.0);
    run.states.push_back(rho0);
    for (int s = 1; s <= steps; ++s) {
        x = rk4_step(model, x, dt);
        const double drift = std::abs(x.trace() - Complex(1.0, 0.0));
        run.max_trace_drift = std::max(run.max_trace_drift, drift);
        if (drift > 1e-5) {
            std::ostringstream os;
            os << "lindblad_evolve: trace drift " << drift << " at step " << s
               << "; reduce dt";
            throw NumericalGuardError(os.str());
        }
        if (s % record_every == 0 || s == steps) {
            run.times.push_back(s * dt);
            try {
                run.states.emplace_back(0.5 * (x + x.adjoint()).eval(), 1e-7, -1e-7);
            } catch (const ValidationError& e) {
                // the generator conserves the trace identically, so unstable
                // steps surface as positivity loss at record time
                throw NumericalGuardError(std::string("lindblad_evolve: state invalid at step ") +
                                          std::to_string(s) + " (" + e.what() + "); reduce dt");
            }
        }
    }
    return run;
}

}  // namespace dhist
