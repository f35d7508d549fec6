// qbm_gaussian.hpp — Closed-form and Monte Carlo quantities for coarse-grained
// quantum Brownian motion in the high-temperature ohmic (Fokker–Planck) limit:
// noise/dissipation kernel amplitudes, the off-diagonal suppression factor,
// fluctuation width, decoherence length, the dissipative residual F[X] and
// Gaussian path weights.

#pragma once

#include <dhist/common.hpp>
#include <dhist/rng.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

namespace dhist {

enum class PotentialKind { free, harmonic };

struct Potential1D {
    PotentialKind kind = PotentialKind::free;
    double omega = 0.0;

    double v_prime(double x, double mass) const {
        return kind == PotentialKind::harmonic ? mass * omega * omega * x : 0.0;
    }
};

struct QbmParams {
    double mass = 1.0;
    double gamma = 0.0;        // dissipation rate
    double temperature = 0.0;
    double sigma = 1.0;        // gaussian sampling width
    double hbar = 1.0;
    double k_boltzmann = 1.0;
    Potential1D potential;

    QbmParams(double m, double g, double temp, double s, double hb = 1.0, double kb = 1.0,
              Potential1D v = {})
        : mass(m), gamma(g), temperature(temp), sigma(s), hbar(hb), k_boltzmann(kb),
          potential(v) {
        require(mass > 0.0 && sigma > 0.0 && hbar > 0.0 && k_boltzmann > 0.0,
                "QbmParams: mass, sigma, hbar, k must be positive");
        require(gamma >= 0.0 && temperature >= 0.0,
                "QbmParams: gamma and temperature must be nonnegative");
    }

    double kt() const { return k_boltzmann * temperature; }
};

struct FpKernels {
    double eta_amplitude;  // coefficient of delta' in the dissipation kernel
    double nu_amplitude;   // coefficient of delta in the noise kernel
};

inline FpKernels fp_kernels(const QbmParams& p) {
    return {p.mass * p.gamma, 2.0 * p.mass * p.gamma * p.kt() / p.hbar};
}

// 2 M gamma k T sigma^2 / hbar^2; the off-diagonal factor is exp(-exponent).
inline double suppression_exponent(const QbmParams& p) {
    return 2.0 * p.mass * p.gamma * p.kt() * p.sigma * p.sigma / (p.hbar * p.hbar);
}

// (Delta F)^2 = hbar^2/sigma^2 + 4 M gamma k T
inline double fluctuation_width_sq(const QbmParams& p) {
    return p.hbar * p.hbar / (p.sigma * p.sigma) + 4.0 * p.mass * p.gamma * p.kt();
}

// l^2 = 2 sigma^2 + hbar^2 / (4 M gamma k T); infinite without thermal noise.
inline double decoherence_length_sq(const QbmParams& p) {
    const double thermal = 4.0 * p.mass * p.gamma * p.kt();
    if (thermal == 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * p.sigma * p.sigma + p.hbar * p.hbar / thermal;
}

// ---------------------------------------------------------------------------
// Sampled paths on a uniform grid.

struct SampledPath {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> x;

    SampledPath(double start, double step, std::vector<double> values)
        : t0(start), dt(step), x(std::move(values)) {
        require(dt > 0.0, "SampledPath: dt must be positive");
        require(x.size() >= 2, "SampledPath: at least two nodes required");
    }

    std::size_t n_nodes() const { return x.size(); }
};

inline bool same_grid(const SampledPath& a, const SampledPath& b) {
    return a.dt == b.dt && a.t0 == b.t0 && a.x.size() == b.x.size();
}

// F_k = M d2X + M gamma dX + V'(X_k) at interior nodes (central differences).
inline std::vector<double> classical_residual(const SampledPath& path, const QbmParams& p) {
    require(path.n_nodes() >= 3, "classical_residual: path too short for second differences");
    std::vector<double> f(path.n_nodes() - 2);
    const double dt2 = path.dt * path.dt;
    for (std::size_t k = 1; k + 1 < path.n_nodes(); ++k) {
        const double d2 = (path.x[k + 1] - 2.0 * path.x[k] + path.x[k - 1]) / dt2;
        const double d1 = (path.x[k + 1] - path.x[k - 1]) / (2.0 * path.dt);
        f[k - 1] = p.mass * d2 + p.mass * p.gamma * d1 + p.potential.v_prime(path.x[k], p.mass);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Gaussian Wigner weight for the initial data (X0, M Xdot0).

struct GaussianWigner {
    double mean_x = 0.0;
    double mean_p = 0.0;
    Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();

    GaussianWigner(double mx, double mp, const Eigen::Matrix2d& c, double hbar = 1.0)
        : mean_x(mx), mean_p(mp), cov(c) {
        require(std::abs(cov(0, 1) - cov(1, 0)) <= 1e-12 * (1.0 + cov.cwiseAbs().maxCoeff()),
                "GaussianWigner: covariance not symmetric");
        const double det = cov.determinant();
        require(cov(0, 0) > 0.0 && det > 0.0, "GaussianWigner: covariance not positive definite");
        require(det >= 0.25 * hbar * hbar * (1.0 - 1e-12),
                "GaussianWigner: covariance below the uncertainty bound");
    }

    double density(double x, double p) const {
        Eigen::Vector2d d(x - mean_x, p - mean_p);
        const double q = d.dot(cov.inverse() * d);
        return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(cov.determinant()));
    }
};

// ---------------------------------------------------------------------------
// Monte Carlo path weight for the diagonal distribution
//   w[xbar] = int DX W(M Xdot0, X0) exp(-int dt (X-xbar)^2/sigma^2
//                                        - int dt F[X]^2 / 2 (Delta F)^2).
// The window term is used as the Gaussian proposal (trapezoid weights), the
// momentum is the forward difference M (X1-X0)/dt, and the F-term is summed
// over interior nodes. Weights are unnormalized; only ratios on a shared grid
// are meaningful.

struct PathWeight {
    double estimate = 0.0;
    double std_error = 0.0;
    int n_mc = 0;
};

inline PathWeight path_probability(const SampledPath& xbar, const QbmParams& p,
                                   const GaussianWigner& wigner, int n_mc, std::uint64_t seed) {
    require(n_mc >= 1000, "path_probability: n_mc must be at least 1000");
    const std::size_t n = xbar.n_nodes();
    const double df2 = fluctuation_width_sq(p);

    // proposal: X_k ~ N(xbar_k, v_k), v_k = sigma^2 / (2 w_k dt)
    std::vector<double> stddev(n), trap(n, 1.0);
    trap.front() = trap.back() = 0.5;
    double log_z = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double v = p.sigma * p.sigma / (2.0 * trap[k] * xbar.dt);
        require(v > 0.0 && std::isfinite(v), "path_probability: degenerate proposal width");
        stddev[k] = std::sqrt(v);
        log_z += 0.5 * std::log(2.0 * std::numbers::pi * v);
    }

    std::vector<double> x(n);
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n_mc; ++i) {
        for (std::size_t k = 0; k < n; ++k)
            x[k] = xbar.x[k] +
                   stddev[k] * normal_draw(stream_key({seed, static_cast<std::uint64_t>(i),
                                                       static_cast<std::uint64_t>(k)}));
        const double p0 = p.mass * (x[1] - x[0]) / xbar.dt;
        double log_f = std::log(wigner.density(x[0], p0) + 1e-300);
        for (std::size_t k = 1; k + 1 < n; ++k) {
            const double d2 = (x[k + 1] - 2.0 * x[k] + x[k - 1]) / (xbar.dt * xbar.dt);
            const double d1 = (x[k + 1] - x[k - 1]) / (2.0 * xbar.dt);
            const double fk = p.mass * d2 + p.mass * p.gamma * d1 +
                              p.potential.v_prime(x[k], p.mass);
            log_f -= xbar.dt * fk * fk / (2.0 * df2);
        }
        const double f = std::exp(log_f);
        sum += f;
        sum_sq += f * f;
    }

    const double mean = sum / n_mc;
    const double var = std::max(0.0, sum_sq / n_mc - mean * mean);
    const double z = std::exp(log_z);
    return {z * mean, z * std::sqrt(var / n_mc), n_mc};
}

// ---------------------------------------------------------------------------
// Off-diagonal suppression between two sampled paths:
// exp(-sum_k w_k dt (x_k - y_k)^2 / (2 l^2)).

struct OffDiagonalSuppression {
    double log_factor = 0.0;
    double factor = 1.0;  // underflows to 0 for macroscopic separations
};

inline OffDiagonalSuppression decoherence_offdiagonal(const SampledPath& x, const SampledPath& y,
                                                      const QbmParams& p) {
    require(same_grid(x, y), "decoherence_offdiagonal: paths must share the grid");
    const double l2 = decoherence_length_sq(p);
    if (std::isinf(l2)) return {0.0, 1.0};
    double acc = 0.0;
    for (std::size_t k = 0; k < x.n_nodes(); ++k) {
        const double w = (k == 0 || k + 1 == x.n_nodes()) ? 0.5 : 1.0;
        const double d = x.x[k] - y.x[k];
        acc += w * x.dt * d * d;
    }
    const double log_factor = -acc / (2.0 * l2);
    return {log_factor, std::exp(log_factor)};
}

}  // namespace dhist
