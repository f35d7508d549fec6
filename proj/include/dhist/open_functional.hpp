// open_functional.hpp — Decoherence functional for reduced (Markovian)
// dynamics: two-sided objects P_a X P_a' propagated with the Lindblad
// generator between sampling times.

#pragma once

#include <dhist/histories.hpp>
#include <dhist/lindblad.hpp>
#include <dhist/qbm_lattice.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <vector>

namespace dhist {

class TwoSidedPropagator {
public:
    virtual ~TwoSidedPropagator() = default;
    virtual void evolve(Matrix& x, double t_from, double t_to) const = 0;
};

class LindbladRk4Propagator : public TwoSidedPropagator {
public:
    LindbladRk4Propagator(LindbladModel model, double dt_max)
        : model_(std::move(model)), dt_max_(dt_max) {
        require(dt_max_ > 0.0, "LindbladRk4Propagator: dt_max must be positive");
    }

    void evolve(Matrix& x, double t_from, double t_to) const override {
        require(t_to >= t_from, "LindbladRk4Propagator: times out of order");
        const double span = t_to - t_from;
        if (span == 0.0) return;
        const int n = std::max(1, static_cast<int>(std::ceil(span / dt_max_)));
        const double h = span / n;
        for (int s = 0; s < n; ++s) x = rk4_step(model_, x, h);
    }

    const LindbladModel& model() const { return model_; }

private:
    LindbladModel model_;
    double dt_max_;
};

// Split-step propagation for the lattice position-decoherence model; the
// per-interval step count comes from dt_max, sub-flows stay exact.
class QbmLatticeTwoSidedPropagator : public TwoSidedPropagator {
public:
    QbmLatticeTwoSidedPropagator(QbmLatticeModel model, double dt_max)
        : model_(std::move(model)), dt_max_(dt_max) {
        require(dt_max_ > 0.0, "QbmLatticeTwoSidedPropagator: dt_max must be positive");
    }

    void evolve(Matrix& x, double t_from, double t_to) const override {
        require(t_to >= t_from, "QbmLatticeTwoSidedPropagator: times out of order");
        const double span = t_to - t_from;
        if (span == 0.0) return;
        const int n = std::max(1, static_cast<int>(std::ceil(span / dt_max_)));
        const double h = span / n;
        auto it = cache_.find(h);
        if (it == cache_.end())
            it = cache_.emplace(h, QbmSplitStepPropagator(model_, h)).first;
        it->second.evolve_steps(x, n);
    }

private:
    QbmLatticeModel model_;
    double dt_max_;
    mutable std::map<double, QbmSplitStepPropagator> cache_;
};

// D(a, a') over the full string set. Objects are evolved per prefix pair
// (all slots but the last); same-family orthogonality under the trace makes
// the final slot exactly diagonal, closed or open.
inline DecoherenceMatrix open_decoherence_functional(const TwoSidedPropagator& prop,
                                                     const std::vector<double>& times,
                                                     const std::vector<ProjectorFamily>& families,
                                                     const DensityOperator& rho0,
                                                     double norm_tol = 1e-8) {
    require(!times.empty() && times.size() == families.size(),
            "open_decoherence_functional: one family per time required");
    require(times.front() >= 0.0, "open_decoherence_functional: times must start at t >= 0");
    for (std::size_t k = 1; k < times.size(); ++k)
        require(times[k] > times[k - 1],
                "open_decoherence_functional: times must be strictly increasing");
    const Eigen::Index d = rho0.dim();
    for (const auto& f : families)
        require(f.dim() == d, "open_decoherence_functional: family dimension mismatch");

    const std::size_t n_times = times.size();
    std::size_t n_prefix = 1;
    for (std::size_t k = 0; k + 1 < n_times; ++k) {
        require(n_prefix <= 300 / families[k].size() + 1,
                "open_decoherence_functional: too many history prefixes");
        n_prefix *= families[k].size();
    }
    require(n_prefix <= 300, "open_decoherence_functional: too many history prefixes");

    // rho evolved to the first sampling time
    Matrix rho_t = rho0.matrix();
    prop.evolve(rho_t, 0.0, times.front());

    // pair objects for prefixes, upper triangle only (X_vu = X_uv^dag)
    struct PairObj {
        std::size_t u, v;
        Matrix x;
    };
    std::vector<PairObj> level{{0, 0, rho_t}};
    std::size_t prefix_count = 1;

    for (std::size_t k = 0; k + 1 < n_times; ++k) {
        const auto& fam = families[k];
        const std::size_t m = fam.size();
        std::vector<PairObj> next;
        next.reserve(level.size() * m * m);
        for (const auto& obj : level) {
            for (std::size_t a = 0; a < m; ++a) {
                const std::size_t start = (obj.u == obj.v) ? a : 0;
                for (std::size_t ap = start; ap < m; ++ap) {
                    PairObj e;
                    e.u = obj.u * m + a;
                    e.v = obj.v * m + ap;
                    e.x = fam.member(a) * obj.x * fam.member(ap);
                    next.push_back(std::move(e));
                }
            }
        }
        for (auto& obj : next) prop.evolve(obj.x, times[k], times[k + 1]);
        level = std::move(next);
        prefix_count *= m;
    }

    const auto& last = families.back();
    const std::size_t mf = last.size();
    const std::size_t n_strings = prefix_count * mf;
    Matrix dmat = Matrix::Zero(static_cast<Eigen::Index>(n_strings),
                               static_cast<Eigen::Index>(n_strings));
    for (const auto& obj : level)
        for (std::size_t b = 0; b < mf; ++b) {
            const Complex val = (last.member(b) * obj.x).trace();
            const Eigen::Index i = static_cast<Eigen::Index>(obj.u * mf + b);
            const Eigen::Index j = static_cast<Eigen::Index>(obj.v * mf + b);
            dmat(i, j) = (i == j) ? Complex(val.real(), 0.0) : val;
            if (i != j) dmat(j, i) = std::conj(val);
        }

    // string list in the same order as the index arithmetic above
    std::vector<std::size_t> sizes;
    for (const auto& f : families) sizes.push_back(f.size());
    std::vector<HistoryString> strings(n_strings);
    for (std::size_t idx = 0; idx < n_strings; ++idx) {
        std::vector<int> alt(n_times);
        std::size_t rem = idx;
        for (std::size_t k = n_times; k-- > 0;) {
            alt[k] = static_cast<int>(rem % sizes[k]);
            rem /= sizes[k];
        }
        strings[idx] = HistoryString{std::move(alt)};
    }
    return DecoherenceMatrix(std::move(strings), std::move(dmat), std::move(sizes), 1e-9,
                             norm_tol);
}

inline DecoherenceMatrix open_decoherence_functional(const LindbladModel& model,
                                                     const std::vector<double>& times,
                                                     const std::vector<ProjectorFamily>& families,
                                                     const DensityOperator& rho0, double dt_max,
                                                     double norm_tol = 1e-8) {
    return open_decoherence_functional(LindbladRk4Propagator(model, dt_max), times, families,
                                       rho0, norm_tol);
}

}  // namespace dhist
