// qbm_lattice.hpp — Position-decoherence master equation on the lattice:
// drho/dt = -(i/hbar)[H, rho] - D (x - y)^2 rho, integrated by Strang
// splitting with exact sub-flows (eigendecomposed kinetic step, elementwise
// decay step).

#pragma once

#include <dhist/lattice.hpp>

#include <cmath>
#include <vector>

namespace dhist {

struct QbmLatticeModel {
    LatticeModel lattice;
    double d_loc = 0.0;       // decoherence coefficient, 1/(length^2 time)
    double gamma = 0.0;       // dissipation rate (bookkeeping for derived quantities)
    double temperature = 0.0;

    QbmLatticeModel(LatticeModel lat, double d, double g = 0.0, double temp = 0.0)
        : lattice(std::move(lat)), d_loc(d), gamma(g), temperature(temp) {
        require(d_loc >= 0.0, "QbmLatticeModel: d_loc must be nonnegative");
        require(gamma >= 0.0, "QbmLatticeModel: gamma must be nonnegative");
    }
};

// The decoherence term equals the dissipator of L = sqrt(2 D) x.
inline Matrix qbm_position_lindblad(const QbmLatticeModel& model) {
    return std::sqrt(2.0 * model.d_loc) * position_operator(model.lattice);
}

// Evolves arbitrary (also non-hermitian, two-sided) matrices; both sub-flows
// are exact, so the only error is the O(dt^2) splitting commutator.
class QbmSplitStepPropagator {
public:
    QbmSplitStepPropagator(const QbmLatticeModel& model, double dt)
        : dt_(dt), n_(model.lattice.n_sites) {
        require(dt > 0.0, "QbmSplitStepPropagator: dt must be positive");
        const Matrix h = build_lattice_hamiltonian(model.lattice);
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        const RealVector& vals = es.eigenvalues();
        const Matrix& vecs = es.eigenvectors();
        const double hbar = model.lattice.hbar;
        Vector half(vals.size()), full(vals.size());
        for (Eigen::Index k = 0; k < vals.size(); ++k) {
            half(k) = std::exp(Complex(0.0, -vals(k) * 0.5 * dt / hbar));
            full(k) = std::exp(Complex(0.0, -vals(k) * dt / hbar));
        }
        u_half_ = vecs * half.asDiagonal() * vecs.adjoint();
        u_full_ = vecs * full.asDiagonal() * vecs.adjoint();

        decay_.resize(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
                const double sep = model.lattice.position(i) - model.lattice.position(j);
                decay_(i, j) = std::exp(-model.d_loc * sep * sep * dt);
            }
    }

    double dt() const { return dt_; }

    // n_steps of U_half · decay · U_half with adjacent half steps merged.
    void evolve_steps(Matrix& x, int n_steps) const {
        if (n_steps <= 0) return;
        x = u_half_ * x * u_half_.adjoint();
        x.array() *= decay_.array();
        for (int s = 1; s < n_steps; ++s) {
            x = u_full_ * x * u_full_.adjoint();
            x.array() *= decay_.array();
        }
        x = u_half_ * x * u_half_.adjoint();
    }

private:
    double dt_;
    int n_;
    Matrix u_half_, u_full_;
    RealMatrix decay_;
};

struct QbmLatticeRun {
    std::vector<double> times;
    std::vector<DensityOperator> states;
    double max_trace_drift = 0.0;
    double max_boundary_mass = 0.0;
};

inline double boundary_mass(const LatticeModel& lattice, const Matrix& rho, int n_edge = 2) {
    double m = 0.0;
    for (int i = 0; i < n_edge && i < lattice.n_sites; ++i)
        m += rho(i, i).real() + rho(lattice.n_sites - 1 - i, lattice.n_sites - 1 - i).real();
    return m;
}

inline QbmLatticeRun qbm_position_master_evolve(const QbmLatticeModel& model,
                                                const DensityOperator& rho0, double dt, int steps,
                                                int record_every = 1) {
    require(rho0.dim() == model.lattice.n_sites, "qbm_position_master_evolve: dimension mismatch");
    require(dt > 0.0 && steps >= 0, "qbm_position_master_evolve: dt must be positive");
    if (record_every < 1) record_every = 1;
    guard(boundary_mass(model.lattice, rho0.matrix()) < 1e-8,
          "qbm_position_master_evolve: initial state touches the lattice boundary");

    const QbmSplitStepPropagator prop(model, dt);
    QbmLatticeRun run;
    run.times.push_back(0.0);
    run.states.push_back(rho0);

    Matrix x = rho0.matrix();
    int done = 0;
    while (done < steps) {
        const int chunk = std::min(record_every, steps - done);
        prop.evolve_steps(x, chunk);
        done += chunk;

        const double drift = std::abs(x.trace() - Complex(1.0, 0.0));
        run.max_trace_drift = std::max(run.max_trace_drift, drift);
        guard(drift <= 1e-5, "qbm_position_master_evolve: trace drift " + std::to_string(drift));
        const double edge = boundary_mass(model.lattice, x);
        run.max_boundary_mass = std::max(run.max_boundary_mass, edge);
        guard(edge < 1e-8, "qbm_position_master_evolve: boundary mass " + std::to_string(edge) +
                               "; widen the lattice");

        run.times.push_back(done * dt);
        run.states.emplace_back(0.5 * (x + x.adjoint()).eval(), 1e-7, -1e-7);
    }
    return run;
}

}  // namespace dhist
