// arrival.hpp — Spacetime coarse grainings on the lattice: restricted
// propagators and the two-alternative set {never crosses into the region
// during [0, tau], crosses at some time}.
//
// "Never crosses" sums the two one-sided restricted propagators, so initial
// states already inside the region contribute their stay-inside amplitude;
// the complement operator then measures boundary crossings. With this
// construction reflection-antisymmetric states of a symmetric lattice give a
// crossing probability compatible with zero.

#pragma once

#include <dhist/histories.hpp>
#include <dhist/qbm_lattice.hpp>

#include <vector>

namespace dhist {

struct CrossingSchedule {
    LatticeModel lattice;
    std::vector<int> region_sites;
    double tau = 1.0;
    int n_steps = 2;

    CrossingSchedule(LatticeModel lat, std::vector<int> region, double horizon, int steps)
        : lattice(std::move(lat)), region_sites(std::move(region)), tau(horizon),
          n_steps(steps) {
        require(tau > 0.0, "CrossingSchedule: tau must be positive");
        require(n_steps >= 2, "CrossingSchedule: n_steps must be >= 2");
        require(!region_sites.empty(), "CrossingSchedule: empty region");
        for (int i : region_sites)
            require(i >= 0 && i < lattice.n_sites, "CrossingSchedule: region site out of range");
    }

    Matrix region_projector() const { return projector_onto_sites(lattice, region_sites); }
    double dt() const { return tau / n_steps; }
};

// [P_out exp(-iH dt/hbar) P_out]^n with P_out the complement of the region.
inline Matrix restricted_propagator(const CrossingSchedule& schedule) {
    const Matrix p_in = schedule.region_projector();
    require(static_cast<Eigen::Index>(schedule.region_sites.size()) < schedule.lattice.n_sites,
            "restricted_propagator: region covers the whole lattice (P_out = 0)");
    const Matrix p_out = identity(schedule.lattice.n_sites) - p_in;
    const Matrix h = build_lattice_hamiltonian(schedule.lattice);
    const Matrix u = unitary_propagator(h, schedule.dt(), schedule.lattice.hbar);
    const Matrix g = p_out * u * p_out;
    Matrix out = p_out;
    for (int s = 0; s < schedule.n_steps; ++s) out = g * out;
    return out;
}

struct CrossingClassOperators {
    Matrix c_not_enter;  // stays on its side of the boundary throughout
    Matrix c_enter;      // crosses into the region at some slice
    Matrix u_tau;        // full propagator over [0, tau]
};

inline CrossingClassOperators crossing_class_operators(const CrossingSchedule& schedule) {
    const Matrix p_in = schedule.region_projector();
    const Matrix p_out = identity(schedule.lattice.n_sites) - p_in;
    const Matrix h = build_lattice_hamiltonian(schedule.lattice);
    const Matrix u_dt = unitary_propagator(h, schedule.dt(), schedule.lattice.hbar);

    auto one_sided = [&](const Matrix& p) {
        const Matrix g = p * u_dt * p;
        Matrix out = p;
        for (int s = 0; s < schedule.n_steps; ++s) out = g * out;
        return out;
    };

    CrossingClassOperators ops;
    ops.u_tau = unitary_propagator(h, schedule.tau, schedule.lattice.hbar);
    ops.c_not_enter = one_sided(p_out) + one_sided(p_in);
    ops.c_enter = ops.u_tau - ops.c_not_enter;
    return ops;
}

struct CrossingResult {
    DecoherenceMatrix d;        // 2x2 over {not-enter, enter}
    double p_not_enter = 0.0;
    double p_enter = 0.0;
    double re_offdiagonal = 0.0;
    double abs_offdiagonal = 0.0;
    double epsilon = 0.0;       // approximate-decoherence ratio, 0 when undefined
};

namespace detail {

inline CrossingResult package_crossing(Complex d_nn, Complex d_ne, Complex d_ee) {
    Matrix m(2, 2);
    m(0, 0) = Complex(d_nn.real(), 0.0);
    m(1, 1) = Complex(d_ee.real(), 0.0);
    m(0, 1) = d_ne;
    m(1, 0) = std::conj(d_ne);
    std::vector<HistoryString> strings{HistoryString{{0}}, HistoryString{{1}}};
    CrossingResult res{
        DecoherenceMatrix(std::move(strings), std::move(m), {2}, 1e-8, 1e-8),
        std::max(0.0, d_nn.real()),
        std::max(0.0, d_ee.real()),
        std::abs(d_ne.real()),
        std::abs(d_ne),
        0.0};
    try {
        res.epsilon = approx_decoherence_epsilon(res.d).epsilon;
    } catch (const ValidationError&) {
        res.epsilon = 0.0;  // a vanishing branch leaves epsilon undefined
    }
    return res;
}

}  // namespace detail

// Closed-system crossing functional D(a, a') = Tr(C_a rho C_a'^dag).
inline CrossingResult crossing_decoherence(const CrossingSchedule& schedule,
                                           const DensityOperator& rho0) {
    require(rho0.dim() == schedule.lattice.n_sites, "crossing_decoherence: dimension mismatch");
    guard(boundary_mass(schedule.lattice, rho0.matrix()) < 1e-8,
          "crossing_decoherence: initial state touches the lattice boundary");
    const auto ops = crossing_class_operators(schedule);
    const Matrix nr = ops.c_not_enter * rho0.matrix();
    const Matrix er = ops.c_enter * rho0.matrix();
    const Complex d_nn = (nr.array() * ops.c_not_enter.conjugate().array()).sum();
    const Complex d_ne = (nr.array() * ops.c_enter.conjugate().array()).sum();
    const Complex d_ee = (er.array() * ops.c_enter.conjugate().array()).sum();
    return detail::package_crossing(d_nn, d_ne, d_ee);
}

// Open-system variant: between projector sandwiches the two-sided object
// evolves under the position-decoherence master equation of the environment.
inline CrossingResult crossing_decoherence(const CrossingSchedule& schedule,
                                           const DensityOperator& rho0,
                                           const QbmLatticeModel& environment,
                                           int substeps_per_slice = 2) {
    require(rho0.dim() == schedule.lattice.n_sites, "crossing_decoherence: dimension mismatch");
    require(environment.lattice.n_sites == schedule.lattice.n_sites,
            "crossing_decoherence: environment lattice mismatch");
    require(substeps_per_slice >= 1, "crossing_decoherence: substeps must be >= 1");
    guard(boundary_mass(schedule.lattice, rho0.matrix()) < 1e-8,
          "crossing_decoherence: initial state touches the lattice boundary");

    const Matrix p_in = schedule.region_projector();
    const Matrix p_out = identity(schedule.lattice.n_sites) - p_in;
    const Matrix one = identity(schedule.lattice.n_sites);
    const QbmSplitStepPropagator prop(environment, schedule.dt() / substeps_per_slice);

    // T[s, s'] = Tr of rho sandwiched by side projectors at every slice
    auto propagate = [&](const Matrix& left, const Matrix& right) {
        Matrix x = left * rho0.matrix() * right;
        for (int s = 0; s < schedule.n_steps; ++s) {
            prop.evolve_steps(x, substeps_per_slice);
            x = left * x * right;
        }
        return x.trace();
    };

    const Complex t_oo = propagate(p_out, p_out);
    const Complex t_ii = propagate(p_in, p_in);
    const Complex t_oi = propagate(p_out, p_in);
    const Complex t_of = propagate(p_out, one);
    const Complex t_if = propagate(p_in, one);

    const Complex d_nn = t_oo + t_ii + t_oi + std::conj(t_oi);
    const Complex d_nf = t_of + t_if;
    const Complex d_ne = d_nf - d_nn;
    const Complex d_ee = Complex(1.0, 0.0) - d_nf - std::conj(d_nf) + d_nn;
    return detail::package_crossing(d_nn, d_ne, d_ee);
}

}  // namespace dhist
