// lattice.hpp — 1D position lattice: model parameters, discretized Hamiltonian,
// wavepackets, site regions and position-bin projector families.

#pragma once

#include <dhist/operator_algebra.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace dhist {

struct LatticeModel {
    int n_sites = 0;
    double x_min = 0.0;
    double dx = 0.0;
    double mass = 1.0;
    RealVector potential;  // per site; empty means free
    double hbar = 1.0;

    LatticeModel(int n, double xmin, double spacing, double m, RealVector v = {},
                 double hb = 1.0)
        : n_sites(n), x_min(xmin), dx(spacing), mass(m), potential(std::move(v)), hbar(hb) {
        require(n_sites >= 2, "LatticeModel: n_sites must be >= 2");
        require(dx > 0.0, "LatticeModel: dx must be positive");
        require(hbar > 0.0, "LatticeModel: hbar must be positive");
        if (potential.size() == 0) potential = RealVector::Zero(n_sites);
        require(potential.size() == n_sites, "LatticeModel: potential size mismatch");
    }

    double position(int i) const { return x_min + i * dx; }
    double x_max() const { return position(n_sites - 1); }

    // Grid symmetric about x = 0 (no site at 0 for even n_sites).
    static LatticeModel centered(int n, double spacing, double m, RealVector v = {},
                                 double hb = 1.0) {
        const double xmin = -0.5 * (n - 1) * spacing;
        return LatticeModel(n, xmin, spacing, m, std::move(v), hb);
    }
};

// Kinetic term by fourth-order central differences with reflecting (Dirichlet)
// boundaries, plus the diagonal potential. mass = inf switches the kinetic
// term off.
inline Matrix build_lattice_hamiltonian(const LatticeModel& model) {
    const int n = model.n_sites;
    Matrix h = Matrix::Zero(n, n);
    const double c = std::isinf(model.mass)
                         ? 0.0
                         : model.hbar * model.hbar / (24.0 * model.mass * model.dx * model.dx);
    for (int i = 0; i < n; ++i) {
        h(i, i) = 30.0 * c + model.potential(i);
        if (i + 1 < n) {
            h(i, i + 1) = -16.0 * c;
            h(i + 1, i) = -16.0 * c;
        }
        if (i + 2 < n) {
            h(i, i + 2) = c;
            h(i + 2, i) = c;
        }
    }
    return h;
}

inline RealVector harmonic_potential(const LatticeModel& model, double omega, double x0 = 0.0) {
    RealVector v(model.n_sites);
    for (int i = 0; i < model.n_sites; ++i) {
        const double d = model.position(i) - x0;
        v(i) = 0.5 * model.mass * omega * omega * d * d;
    }
    return v;
}

// Normalized Gaussian packet exp(-(x-x0)^2/(4 sigma^2) + i k x).
inline StateVector gaussian_wavepacket(const LatticeModel& model, double x0, double sigma,
                                       double k = 0.0) {
    require(sigma > 0.0, "gaussian_wavepacket: sigma must be positive");
    Vector psi(model.n_sites);
    for (int i = 0; i < model.n_sites; ++i) {
        const double x = model.position(i);
        const double arg = -(x - x0) * (x - x0) / (4.0 * sigma * sigma);
        psi(i) = std::exp(arg) * std::exp(Complex(0.0, k * x));
    }
    return StateVector::normalized(psi);
}

inline Matrix position_operator(const LatticeModel& model) {
    Matrix x = Matrix::Zero(model.n_sites, model.n_sites);
    for (int i = 0; i < model.n_sites; ++i) x(i, i) = model.position(i);
    return x;
}

// Site reflection i <-> n-1-i (exact parity for grids centered on 0).
inline Matrix parity_operator(const LatticeModel& model) {
    Matrix p = Matrix::Zero(model.n_sites, model.n_sites);
    for (int i = 0; i < model.n_sites; ++i) p(model.n_sites - 1 - i, i) = 1.0;
    return p;
}

// Sites with a <= x <= b; interval endpoints belong to the region.
inline std::vector<int> sites_in_box(const LatticeModel& model, double a, double b) {
    std::vector<int> sites;
    const double eps = 1e-9 * model.dx;
    for (int i = 0; i < model.n_sites; ++i) {
        const double x = model.position(i);
        if (x >= a - eps && x <= b + eps) sites.push_back(i);
    }
    return sites;
}

inline std::vector<int> sites_left_of(const LatticeModel& model, double c) {
    return sites_in_box(model, model.x_min - model.dx, c);
}

inline std::vector<int> sites_right_of(const LatticeModel& model, double c) {
    return sites_in_box(model, c, model.x_max() + model.dx);
}

inline Matrix projector_onto_sites(const LatticeModel& model, const std::vector<int>& sites) {
    Matrix p = Matrix::Zero(model.n_sites, model.n_sites);
    for (int i : sites) {
        require(i >= 0 && i < model.n_sites, "projector_onto_sites: site index out of range");
        p(i, i) = 1.0;
    }
    return p;
}

// Exhaustive family of position bins (-inf, e1), [e1, e2), ..., [em, inf).
inline ProjectorFamily position_bin_family(const LatticeModel& model,
                                           const std::vector<double>& interior_edges) {
    std::vector<Matrix> members;
    std::vector<std::string> labels;
    const std::size_t n_bins = interior_edges.size() + 1;
    for (std::size_t b = 0; b < n_bins; ++b) {
        const double lo = (b == 0) ? -std::numeric_limits<double>::infinity() : interior_edges[b - 1];
        const double hi = (b == n_bins - 1) ? std::numeric_limits<double>::infinity()
                                            : interior_edges[b];
        Matrix p = Matrix::Zero(model.n_sites, model.n_sites);
        for (int i = 0; i < model.n_sites; ++i) {
            const double x = model.position(i);
            if (x >= lo && x < hi) p(i, i) = 1.0;
        }
        members.push_back(std::move(p));
        labels.push_back("bin" + std::to_string(b));
    }
    return ProjectorFamily(std::move(members), std::move(labels));
}

// Max |psi| over the outermost n_edge sites on each end.
inline double boundary_amplitude(const LatticeModel& model, const Vector& psi, int n_edge = 2) {
    double m = 0.0;
    for (int i = 0; i < n_edge && i < model.n_sites; ++i) {
        m = std::max(m, std::abs(psi(i)));
        m = std::max(m, std::abs(psi(model.n_sites - 1 - i)));
    }
    return m;
}

}  // namespace dhist
