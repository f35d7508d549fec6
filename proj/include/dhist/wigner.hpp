// wigner.hpp — Discrete Wigner transform on the position lattice.
//
// Convention: W(x_i, p) = (1/(pi hbar)) sum_k rho(i+k, i-k) exp(-2 i p k dx / hbar),
// so that sum_p W dp = rho(i,i)/dx (position density) and the phase-space
// integral of W is Tr rho = 1.

#pragma once

#include <dhist/lattice.hpp>

#include <numbers>

namespace dhist {

// Momentum grid spanning one aliasing period pi*hbar/dx.
inline RealVector natural_momentum_grid(const LatticeModel& model, int n_p = 0) {
    if (n_p <= 0) n_p = model.n_sites;
    const double period = std::numbers::pi * model.hbar / model.dx;
    const double dp = period / n_p;
    RealVector p(n_p);
    for (int m = 0; m < n_p; ++m) p(m) = -0.5 * period + m * dp;
    return p;
}

struct WignerFunction {
    RealMatrix values;  // n_sites x n_p
    RealVector p_grid;
    double dp = 0.0;
    double dx = 0.0;

    double phase_space_integral() const { return values.sum() * dx * dp; }

    // sum_p W(x_i, p) dp
    RealVector momentum_marginal() const { return values.rowwise().sum() * dp; }
};

inline WignerFunction wigner_transform(const DensityOperator& rho, const LatticeModel& model,
                                       const RealVector& p_grid, double marginal_tol = 1e-6) {
    require(rho.dim() == model.n_sites, "wigner_transform: dimension mismatch");
    require(p_grid.size() >= 2, "wigner_transform: p grid too small");
    const Matrix& r = rho.matrix();
    const int n = model.n_sites;
    const int np = static_cast<int>(p_grid.size());

    WignerFunction w;
    w.values.resize(n, np);
    w.p_grid = p_grid;
    w.dp = p_grid(1) - p_grid(0);
    w.dx = model.dx;

    const double pref = 1.0 / (std::numbers::pi * model.hbar);
    for (int i = 0; i < n; ++i) {
        const int kmax = std::min(i, n - 1 - i);
        for (int m = 0; m < np; ++m) {
            const double theta = 2.0 * p_grid(m) * model.dx / model.hbar;
            double acc = r(i, i).real();
            for (int k = 1; k <= kmax; ++k)
                acc += 2.0 * (r(i + k, i - k) * std::exp(Complex(0.0, -theta * k))).real();
            w.values(i, m) = pref * acc;
        }
    }

    // Coarse p grids cannot reproduce the position marginal; flag them.
    const RealVector marginal = w.momentum_marginal();
    double defect = 0.0;
    for (int i = 0; i < n; ++i)
        defect = std::max(defect, std::abs(marginal(i) - r(i, i).real() / model.dx));
    guard(defect <= marginal_tol,
          "wigner_transform: momentum marginal defect " + std::to_string(defect) +
              " exceeds tolerance; p grid too coarse");
    return w;
}

inline WignerFunction wigner_transform(const DensityOperator& rho, const LatticeModel& model) {
    return wigner_transform(rho, model, natural_momentum_grid(model));
}

}  // namespace dhist
