// timeless.hpp — Reparametrization-invariant probabilities for stationary
// ensembles: symplectic trajectory integration, time-in-region functionals
// and the region-entry probability with classical or Wigner-function weights.

#pragma once

#include <dhist/parallel.hpp>
#include <dhist/rng.hpp>
#include <dhist/wigner.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace dhist {

// ---------------------------------------------------------------------------
// Ensembles, regions, potentials.

struct PhaseSpaceSample {
    RealVector x;
    RealVector p;
    double weight = 0.0;
};

struct PhaseSpaceEnsemble {
    int dim = 1;
    std::vector<PhaseSpaceSample> samples;

    PhaseSpaceEnsemble(int n_dim, std::vector<PhaseSpaceSample> s)
        : dim(n_dim), samples(std::move(s)) {
        require(dim >= 1, "PhaseSpaceEnsemble: dimension must be >= 1");
        require(!samples.empty(), "PhaseSpaceEnsemble: no samples");
        double total = 0.0;
        for (const auto& smp : samples) {
            require(smp.x.size() == dim && smp.p.size() == dim,
                    "PhaseSpaceEnsemble: sample dimension mismatch");
            require(smp.weight >= 0.0, "PhaseSpaceEnsemble: negative weight");
            total += smp.weight;
        }
        require(std::abs(total - 1.0) <= 1e-9,
                "PhaseSpaceEnsemble: weights must sum to 1 (got " + std::to_string(total) + ")");
    }

    static PhaseSpaceEnsemble normalized(int n_dim, std::vector<PhaseSpaceSample> s) {
        double total = 0.0;
        for (const auto& smp : s) total += smp.weight;
        require(total > 0.0, "PhaseSpaceEnsemble: total weight must be positive");
        double running = 0.0;
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
            s[i].weight /= total;
            running += s[i].weight;
        }
        s.back().weight = 1.0 - running;  // absorb roundoff so the sum is exactly 1
        return PhaseSpaceEnsemble(n_dim, std::move(s));
    }
};

struct Box {
    RealVector lo;
    RealVector hi;

    bool contains(const RealVector& x) const {
        for (Eigen::Index j = 0; j < x.size(); ++j)
            if (x(j) < lo(j) || x(j) > hi(j)) return false;
        return true;
    }
};

// Union of axis-aligned boxes in configuration space.
struct Region {
    std::vector<Box> boxes;

    explicit Region(std::vector<Box> bs) : boxes(std::move(bs)) {
        require(!boxes.empty(), "Region: empty box list");
        for (const auto& b : boxes) {
            require(b.lo.size() == b.hi.size() && b.lo.size() >= 1, "Region: malformed box");
            for (Eigen::Index j = 0; j < b.lo.size(); ++j) {
                require(b.lo(j) < b.hi(j), "Region: box with nonpositive extent");
                require(std::isfinite(b.lo(j)) && std::isfinite(b.hi(j)),
                        "Region: box extents must be finite");
            }
        }
    }

    static Region interval(double lo, double hi) {
        Box b;
        b.lo = RealVector::Constant(1, lo);
        b.hi = RealVector::Constant(1, hi);
        return Region({b});
    }

    bool contains(const RealVector& x) const {
        for (const auto& b : boxes)
            if (b.contains(x)) return true;
        return false;
    }

    double min_width() const {
        double w = std::numeric_limits<double>::infinity();
        for (const auto& b : boxes)
            for (Eigen::Index j = 0; j < b.lo.size(); ++j) w = std::min(w, b.hi(j) - b.lo(j));
        return w;
    }
};

enum class TimelessPotentialKind { free, harmonic, quartic };

// Separable v(x) = sum_j v1(x_j); integrable by construction.
struct TimelessPotential {
    TimelessPotentialKind kind = TimelessPotentialKind::free;
    double omega = 0.0;    // harmonic/quartic: (1/2) M omega^2 x^2 term
    double quartic = 0.0;  // quartic: (1/4) q x^4 term

    double value(const RealVector& x, double mass) const {
        double v = 0.0;
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            const double s = x(j);
            switch (kind) {
                case TimelessPotentialKind::free: break;
                case TimelessPotentialKind::harmonic:
                    v += 0.5 * mass * omega * omega * s * s;
                    break;
                case TimelessPotentialKind::quartic:
                    v += 0.5 * mass * omega * omega * s * s + 0.25 * quartic * s * s * s * s;
                    break;
            }
        }
        return v;
    }

    RealVector gradient(const RealVector& x, double mass) const {
        RealVector g = RealVector::Zero(x.size());
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            const double s = x(j);
            switch (kind) {
                case TimelessPotentialKind::free: break;
                case TimelessPotentialKind::harmonic: g(j) = mass * omega * omega * s; break;
                case TimelessPotentialKind::quartic:
                    g(j) = mass * omega * omega * s + quartic * s * s * s;
                    break;
            }
        }
        return g;
    }
};

struct TrajectorySolver {
    double mass = 1.0;
    TimelessPotential potential;
    double step = 1e-3;           // integrator step h
    double t_max = 10.0;          // horizon when no period is found
    bool detect_period = true;
    double blowup_guard = 1e6;    // |x| beyond this aborts

    TrajectorySolver(double m, TimelessPotential v, double h, double horizon,
                     bool periods = true)
        : mass(m), potential(v), step(h), t_max(horizon), detect_period(periods) {
        require(mass > 0.0 && step > 0.0 && t_max > step,
                "TrajectorySolver: mass, step and horizon must be positive");
    }

    double energy(const RealVector& x, const RealVector& p) const {
        return p.squaredNorm() / (2.0 * mass) + potential.value(x, mass);
    }
};

// ---------------------------------------------------------------------------
// Leapfrog integration with optional first-return period detection.

struct Trajectory {
    std::vector<double> times;
    std::vector<RealVector> x;
    std::vector<RealVector> p;
    std::optional<double> period;
    double energy_drift_rel = 0.0;
    double max_speed = 0.0;
    double step = 0.0;
};

inline Trajectory integrate_trajectory(const TrajectorySolver& solver, const RealVector& x0,
                                       const RealVector& p0) {
    require(x0.size() == p0.size() && x0.size() >= 1,
            "integrate_trajectory: phase-space point malformed");
    const double h = solver.step;
    const int n_steps = static_cast<int>(std::ceil(solver.t_max / h));

    Trajectory traj;
    traj.step = h;
    traj.times.reserve(n_steps + 1);
    traj.x.reserve(n_steps + 1);
    traj.p.reserve(n_steps + 1);

    RealVector x = x0, p = p0;
    const double e0 = solver.energy(x, p);
    const double e_scale = std::max(std::abs(e0), 1e-12);
    traj.times.push_back(0.0);
    traj.x.push_back(x);
    traj.p.push_back(p);

    const double p0n = p0.norm();
    double prev_section = 0.0;
    bool section_armed = false;

    RealVector g = solver.potential.gradient(x, solver.mass);
    for (int s = 1; s <= n_steps; ++s) {
        // kick-drift-kick
        RealVector p_half = p - 0.5 * h * g;
        x += h * p_half / solver.mass;
        g = solver.potential.gradient(x, solver.mass);
        p = p_half - 0.5 * h * g;

        guard(x.cwiseAbs().maxCoeff() < solver.blowup_guard,
              "integrate_trajectory: trajectory left the domain guard");

        traj.times.push_back(s * h);
        traj.x.push_back(x);
        traj.p.push_back(p);
        traj.max_speed = std::max(traj.max_speed, p.norm() / solver.mass);
        traj.energy_drift_rel =
            std::max(traj.energy_drift_rel, std::abs(solver.energy(x, p) - e0) / e_scale);

        // first return through the section (x - x0) . p0 = 0 with p . p0 > 0
        if (solver.detect_period && !traj.period && p0n > 0.0) {
            const double section = (x - x0).dot(p0) / p0n;
            if (s > 1 && section_armed && prev_section < 0.0 && section >= 0.0 &&
                p.dot(p0) > 0.0) {
                const double alpha = prev_section / (prev_section - section);
                const RealVector x_cross = traj.x[s - 1] + alpha * (x - traj.x[s - 1]);
                const RealVector p_cross = traj.p[s - 1] + alpha * (p - traj.p[s - 1]);
                const double x_scale = std::max(1e-12, x0.norm() + x_cross.norm());
                if ((x_cross - x0).norm() <= 1e-3 * x_scale &&
                    (p_cross - p0).norm() <= 1e-3 * p0n)
                    traj.period = (s - 1 + alpha) * h;
            }
            if (section < 0.0) section_armed = true;
            prev_section = section;
        }
    }
    return traj;
}

// Max over sampled orbit points of |w(z(t)) - w(z(0))|.
inline double check_stationarity(
    const std::function<double(const RealVector&, const RealVector&)>& density,
    const TrajectorySolver& solver, const std::vector<std::pair<RealVector, RealVector>>& points,
    double t_probe) {
    require(!points.empty(), "check_stationarity: no probe points");
    TrajectorySolver probe = solver;
    probe.t_max = t_probe;
    probe.detect_period = false;
    double residual = 0.0;
    for (const auto& [x0, p0] : points) {
        const double w0 = density(x0, p0);
        const Trajectory traj = integrate_trajectory(probe, x0, p0);
        for (std::size_t k = 0; k < traj.times.size(); ++k)
            residual = std::max(residual, std::abs(density(traj.x[k], traj.p[k]) - w0));
    }
    return residual;
}

// ---------------------------------------------------------------------------
// Time spent inside a region: piecewise-linear interpolation between samples,
// with bisection for the boundary-crossing fraction (O(h^2) accurate).
// For periodic orbits the dwell is accumulated over one period.

inline double time_in_region(const Trajectory& traj, const Region& region) {
    require(traj.times.size() >= 2, "time_in_region: trajectory too short");
    const double h = traj.step;
    guard(5.0 * traj.max_speed * h <= region.min_width(),
          "time_in_region: trajectory undersampled for this region width "
          "(need region width >= 5 steps of travel)");

    const double horizon = traj.period.value_or(traj.times.back());
    double dwell = 0.0;
    for (std::size_t k = 0; k + 1 < traj.times.size(); ++k) {
        if (traj.times[k] >= horizon) break;
        const double seg_end = std::min(traj.times[k + 1], horizon);
        const double seg = seg_end - traj.times[k];
        const double frac_end = (seg_end - traj.times[k]) / h;

        auto at = [&](double a) -> RealVector {
            return traj.x[k] + a * (traj.x[k + 1] - traj.x[k]);
        };
        const bool in0 = region.contains(traj.x[k]);
        const bool in1 = region.contains(at(frac_end));
        if (in0 == in1) {
            if (in0) dwell += seg;
            continue;
        }
        // bisect the flip point in [0, frac_end]
        double lo = 0.0, hi = frac_end;
        for (int it = 0; it < 50; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (region.contains(at(mid)) == in0) lo = mid;
            else hi = mid;
        }
        const double flip = 0.5 * (lo + hi) * h;
        dwell += in0 ? flip : (seg - flip);
    }
    return dwell;
}

// ---------------------------------------------------------------------------
// Region-entry probability p = sum_i w_i theta(dwell_i - eps), with the
// mandatory eps-sensitivity companions.

struct RegionProbability {
    double probability = 0.0;
    double std_error = 0.0;
    double epsilon = 0.0;
    double probability_half_eps = 0.0;
    double probability_double_eps = 0.0;
};

inline RegionProbability region_entry_probability(const PhaseSpaceEnsemble& ensemble,
                                                  const TrajectorySolver& solver,
                                                  const Region& region, double eps,
                                                  unsigned n_threads = 1) {
    require(eps > 0.0, "region_entry_probability: eps must be positive");
    const std::size_t n = ensemble.samples.size();
    std::vector<double> dwell(n, 0.0);
    parallel_blocks(n, kDefaultBlockSize, n_threads,
                    [&](std::size_t begin, std::size_t end, std::size_t) {
                        for (std::size_t i = begin; i < end; ++i) {
                            const auto& s = ensemble.samples[i];
                            dwell[i] =
                                time_in_region(integrate_trajectory(solver, s.x, s.p), region);
                        }
                    });

    auto weigh = [&](double threshold) {
        double p = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (dwell[i] > threshold) p += ensemble.samples[i].weight;
        return p;
    };

    RegionProbability out;
    out.epsilon = eps;
    out.probability = weigh(eps);
    out.probability_half_eps = weigh(0.5 * eps);
    out.probability_double_eps = weigh(2.0 * eps);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double theta = dwell[i] > eps ? 1.0 : 0.0;
        const double w = ensemble.samples[i].weight;
        var += w * w * (theta - out.probability) * (theta - out.probability);
    }
    out.std_error = std::sqrt(var);
    return out;
}

// ---------------------------------------------------------------------------
// Reparametrization-invariance diagnostics: per-period dwell must not depend
// on the integrator step or on where along the orbit the integration starts.

struct ReparamReport {
    double dwell = 0.0;
    double dwell_half_step = 0.0;
    double dwell_shifted = 0.0;
    double rel_err_step = 0.0;
    double rel_err_shift = 0.0;
    bool periodic = false;
    bool pass = false;
};

inline ReparamReport reparam_invariant_check(const TrajectorySolver& solver, const RealVector& x0,
                                             const RealVector& p0, const Region& region,
                                             double tol = 1e-4) {
    const Trajectory base = integrate_trajectory(solver, x0, p0);
    TrajectorySolver fine = solver;
    fine.step = 0.5 * solver.step;
    const Trajectory half = integrate_trajectory(fine, x0, p0);

    ReparamReport rep;
    rep.periodic = base.period.has_value();
    rep.dwell = time_in_region(base, region);
    rep.dwell_half_step = time_in_region(half, region);

    // restart from a point advanced along the orbit (half a period, or half
    // the horizon when the orbit is not periodic)
    const double advance = 0.5 * base.period.value_or(solver.t_max);
    TrajectorySolver hop = solver;
    hop.t_max = advance;
    hop.detect_period = false;
    const Trajectory leg = integrate_trajectory(hop, x0, p0);
    const Trajectory shifted = integrate_trajectory(solver, leg.x.back(), leg.p.back());
    rep.dwell_shifted = time_in_region(shifted, region);

    const double scale = std::max({std::abs(rep.dwell), std::abs(rep.dwell_half_step), 1e-12});
    rep.rel_err_step = std::abs(rep.dwell - rep.dwell_half_step) / scale;
    rep.rel_err_shift = std::abs(rep.dwell - rep.dwell_shifted) / scale;
    // the shifted comparison is meaningful per period; over a finite horizon
    // it only enters the report
    rep.pass = rep.rel_err_step <= tol && (!rep.periodic || rep.rel_err_shift <= tol);
    return rep;
}

// ---------------------------------------------------------------------------
// Ensemble builders.

inline PhaseSpaceEnsemble thermal_harmonic_ensemble(double mass, double omega, double kt, int n,
                                                    std::uint64_t seed) {
    require(n >= 1 && mass > 0.0 && omega > 0.0 && kt > 0.0,
            "thermal_harmonic_ensemble: bad parameters");
    std::vector<PhaseSpaceSample> samples(static_cast<std::size_t>(n));
    const double sx = std::sqrt(kt / (mass * omega * omega));
    const double sp = std::sqrt(mass * kt);
    for (int i = 0; i < n; ++i) {
        const auto g = normal_pair(stream_key({seed, static_cast<std::uint64_t>(i)}));
        samples[i].x = RealVector::Constant(1, sx * g.first);
        samples[i].p = RealVector::Constant(1, sp * g.second);
        samples[i].weight = 1.0;
    }
    return PhaseSpaceEnsemble::normalized(1, std::move(samples));
}

inline PhaseSpaceEnsemble gaussian_phase_space_ensemble(double mean_x, double mean_p,
                                                        double var_x, double var_p, int n,
                                                        std::uint64_t seed) {
    require(n >= 1 && var_x > 0.0 && var_p > 0.0, "gaussian_phase_space_ensemble: bad parameters");
    std::vector<PhaseSpaceSample> samples(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto g = normal_pair(stream_key({seed, static_cast<std::uint64_t>(i)}));
        samples[i].x = RealVector::Constant(1, mean_x + std::sqrt(var_x) * g.first);
        samples[i].p = RealVector::Constant(1, mean_p + std::sqrt(var_p) * g.second);
        samples[i].weight = 1.0;
    }
    return PhaseSpaceEnsemble::normalized(1, std::move(samples));
}

// ---------------------------------------------------------------------------
// Semiclassical weight: the Wigner function of a lattice state replaces the
// classical density. Cells are drawn proportionally to |W|, signs ride along
// as +-1 weights; a large negative-weight fraction flags the estimate.

struct SemiclassicalProbability {
    double probability = 0.0;
    double std_error = 0.0;
    double negative_weight_fraction = 0.0;
    bool unreliable = false;
    double epsilon = 0.0;
};

inline SemiclassicalProbability semiclassical_probability(
    const DensityOperator& rho, const LatticeModel& lattice, const TrajectorySolver& solver,
    const Region& region, double eps, int n_samples, std::uint64_t seed,
    unsigned n_threads = 1) {
    require(n_samples >= 1, "semiclassical_probability: n_samples must be >= 1");
    require(eps > 0.0, "semiclassical_probability: eps must be positive");

    const WignerFunction w = wigner_transform(rho, lattice);
    const int nx = static_cast<int>(w.values.rows());
    const int np = static_cast<int>(w.values.cols());
    const double cell = w.dx * w.dp;

    std::vector<double> cdf(static_cast<std::size_t>(nx) * np);
    double total_abs = 0.0, total_neg = 0.0;
    for (int i = 0; i < nx; ++i)
        for (int m = 0; m < np; ++m) {
            const double c = w.values(i, m) * cell;
            total_abs += std::abs(c);
            if (c < 0.0) total_neg += -c;
            cdf[static_cast<std::size_t>(i) * np + m] = total_abs;
        }
    require(total_abs > 0.0, "semiclassical_probability: vanishing Wigner weight");

    SemiclassicalProbability out;
    out.epsilon = eps;
    out.negative_weight_fraction = total_neg / total_abs;
    out.unreliable = out.negative_weight_fraction > 0.2;

    // draw cells, then integrate each distinct cell once
    std::vector<std::size_t> cells(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        const double u = uniform_draw(stream_key({seed, static_cast<std::uint64_t>(i)})) *
                         total_abs;
        cells[i] = static_cast<std::size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        if (cells[i] >= cdf.size()) cells[i] = cdf.size() - 1;
    }
    std::vector<std::size_t> distinct = cells;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<double> dwell_of(distinct.size());
    parallel_blocks(distinct.size(), 8, n_threads,
                    [&](std::size_t begin, std::size_t end, std::size_t) {
                        for (std::size_t d = begin; d < end; ++d) {
                            const std::size_t c = distinct[d];
                            const int i = static_cast<int>(c / np);
                            const int m = static_cast<int>(c % np);
                            const RealVector x0 = RealVector::Constant(1, lattice.position(i));
                            const RealVector p0 = RealVector::Constant(1, w.p_grid(m));
                            dwell_of[d] =
                                time_in_region(integrate_trajectory(solver, x0, p0), region);
                        }
                    });
    std::map<std::size_t, double> dwell;
    for (std::size_t d = 0; d < distinct.size(); ++d) dwell[distinct[d]] = dwell_of[d];

    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const std::size_t c = cells[i];
        const double sign = w.values(static_cast<int>(c / np), static_cast<int>(c % np)) < 0.0
                                ? -1.0
                                : 1.0;
        const double v = sign * (dwell[c] > eps ? 1.0 : 0.0);
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / n_samples;
    const double var = std::max(0.0, sum_sq / n_samples - mean * mean);
    out.probability = total_abs * mean;
    out.std_error = total_abs * std::sqrt(var / n_samples);
    return out;
}

}  // namespace dhist
