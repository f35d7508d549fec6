// histories.hpp — Class operators, the decoherence functional and the
// consistency / decoherence / retrodiction toolkit.

#pragma once

#include <dhist/operator_algebra.hpp>

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace dhist {

// Hard cap on explicit history enumeration.
inline constexpr std::size_t kMaxHistoryStrings = 100000;

// ---------------------------------------------------------------------------
// Schedule and history strings.

struct HistorySchedule {
    std::vector<double> times;             // strictly increasing
    std::vector<ProjectorFamily> families; // one per time
    Matrix hamiltonian;
    double t0 = 0.0;
    double hbar = 1.0;

    HistorySchedule(std::vector<double> ts, std::vector<ProjectorFamily> fams, Matrix h,
                    double t_origin = 0.0, double hb = 1.0)
        : times(std::move(ts)), families(std::move(fams)), hamiltonian(std::move(h)),
          t0(t_origin), hbar(hb) {
        require(!times.empty(), "HistorySchedule: no sampling times");
        require(times.size() == families.size(),
                "HistorySchedule: one projector family required per time");
        for (std::size_t k = 1; k < times.size(); ++k)
            require(times[k] > times[k - 1], "HistorySchedule: times must be strictly increasing");
        require(is_hermitian(hamiltonian), "HistorySchedule: hamiltonian not hermitian");
        const Eigen::Index d = hamiltonian.rows();
        for (const auto& f : families)
            require(f.dim() == d, "HistorySchedule: family dimension mismatch");
    }

    Eigen::Index dim() const { return hamiltonian.rows(); }
    std::size_t n_times() const { return times.size(); }

    std::size_t n_strings() const {
        std::size_t n = 1;
        for (const auto& f : families) {
            require(n <= kMaxHistoryStrings / f.size(),
                    "HistorySchedule: history enumeration exceeds the 1e5 string cap; "
                    "supply an explicit string subset");
            n *= f.size();
        }
        return n;
    }

    // Heisenberg projectors for every (time, alternative).
    std::vector<std::vector<Matrix>> heisenberg_families() const {
        std::vector<std::vector<Matrix>> out(times.size());
        for (std::size_t k = 0; k < times.size(); ++k) {
            const Matrix u = unitary_propagator(hamiltonian, times[k] - t0, hbar);
            out[k].reserve(families[k].size());
            for (std::size_t a = 0; a < families[k].size(); ++a)
                out[k].push_back(u.adjoint() * families[k].member(a) * u);
        }
        return out;
    }
};

struct HistoryString {
    std::vector<int> alternatives;  // one label index per time slot

    bool operator==(const HistoryString& o) const { return alternatives == o.alternatives; }
};

inline void validate_string(const HistorySchedule& schedule, const HistoryString& s) {
    require(s.alternatives.size() == schedule.n_times(),
            "HistoryString: wrong number of slots");
    for (std::size_t k = 0; k < s.alternatives.size(); ++k)
        require(s.alternatives[k] >= 0 &&
                    static_cast<std::size_t>(s.alternatives[k]) < schedule.families[k].size(),
                "HistoryString: label out of range at slot " + std::to_string(k));
}

inline std::vector<HistoryString> enumerate_strings(const HistorySchedule& schedule) {
    const std::size_t total = schedule.n_strings();
    std::vector<HistoryString> out;
    out.reserve(total);
    HistoryString cur;
    cur.alternatives.assign(schedule.n_times(), 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        out.push_back(cur);
        for (std::size_t k = schedule.n_times(); k-- > 0;) {
            if (++cur.alternatives[k] < static_cast<int>(schedule.families[k].size())) break;
            cur.alternatives[k] = 0;
        }
    }
    return out;
}

inline std::string string_label(const HistorySchedule& schedule, const HistoryString& s) {
    std::string out;
    for (std::size_t k = 0; k < s.alternatives.size(); ++k) {
        if (k) out += ",";
        out += schedule.families[k].label(static_cast<std::size_t>(s.alternatives[k]));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Class operators.

// C_s = P_{a_n}(t_n) ... P_{a_1}(t_1)
inline Matrix class_operator(const HistorySchedule& schedule, const HistoryString& s) {
    validate_string(schedule, s);
    const auto heis = schedule.heisenberg_families();
    Matrix c = heis[0][static_cast<std::size_t>(s.alternatives[0])];
    for (std::size_t k = 1; k < schedule.n_times(); ++k)
        c = heis[k][static_cast<std::size_t>(s.alternatives[k])] * c;
    return c;
}

// Sum of chain operators; covers coarse grainings that are not single chains.
inline Matrix class_operator_sum(const HistorySchedule& schedule,
                                 const std::vector<HistoryString>& strings) {
    require(!strings.empty(), "class_operator_sum: empty string list");
    Matrix c = Matrix::Zero(schedule.dim(), schedule.dim());
    for (const auto& s : strings) c += class_operator(schedule, s);
    return c;
}

// ---------------------------------------------------------------------------
// Decoherence matrix D(s, s') = Tr(C_s rho C_s'^dag).

class DecoherenceMatrix {
public:
    DecoherenceMatrix(std::vector<HistoryString> strings, Matrix entries,
                      std::vector<std::size_t> slot_sizes, double herm_tol = kTolStructural,
                      double norm_tol = kTolEvolution)
        : strings_(std::move(strings)), entries_(std::move(entries)),
          slot_sizes_(std::move(slot_sizes)) {
        const Eigen::Index n = static_cast<Eigen::Index>(strings_.size());
        require(n > 0 && entries_.rows() == n && entries_.cols() == n,
                "DecoherenceMatrix: entry matrix must be S x S");
        const double herm = hermiticity_defect(entries_);
        if (herm > herm_tol) {
            std::ostringstream os;
            os << "DecoherenceMatrix: hermiticity defect " << herm;
            throw ValidationError(os.str());
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            require(std::abs(entries_(i, i).imag()) <= herm_tol,
                    "DecoherenceMatrix: diagonal entry not real");
            require(entries_(i, i).real() >= -1e-10,
                    "DecoherenceMatrix: negative diagonal entry");
        }
        const double norm_err = std::abs(entries_.sum() - Complex(1.0, 0.0));
        if (norm_err > norm_tol) {
            std::ostringstream os;
            os << "DecoherenceMatrix: sum of entries deviates from 1 by " << norm_err;
            throw ValidationError(os.str());
        }
    }

    std::size_t size() const { return strings_.size(); }
    const std::vector<HistoryString>& strings() const { return strings_; }
    const Matrix& entries() const { return entries_; }
    Complex entry(std::size_t i, std::size_t j) const {
        return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    double probability(std::size_t i) const {
        return std::max(0.0, entry(i, i).real());
    }
    const std::vector<std::size_t>& slot_sizes() const { return slot_sizes_; }

private:
    std::vector<HistoryString> strings_;
    Matrix entries_;
    std::vector<std::size_t> slot_sizes_;  // family sizes per slot, for coarse graining
};

inline DecoherenceMatrix decoherence_functional(const HistorySchedule& schedule,
                                                const DensityOperator& rho,
                                                const std::vector<HistoryString>& strings) {
    require(rho.dim() == schedule.dim(), "decoherence_functional: dimension mismatch");
    require(!strings.empty(), "decoherence_functional: empty string set");
    for (const auto& s : strings) validate_string(schedule, s);

    const auto heis = schedule.heisenberg_families();
    const std::size_t n = strings.size();
    std::vector<Matrix> chain(n);
    for (std::size_t i = 0; i < n; ++i) {
        Matrix c = heis[0][static_cast<std::size_t>(strings[i].alternatives[0])];
        for (std::size_t k = 1; k < schedule.n_times(); ++k)
            c = heis[k][static_cast<std::size_t>(strings[i].alternatives[k])] * c;
        chain[i] = std::move(c);
    }

    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const Matrix ci_rho = chain[i] * rho.matrix();
        for (std::size_t j = i; j < n; ++j) {
            // Tr(C_i rho C_j^dag)
            const Complex v = (ci_rho.array() * chain[j].conjugate().array()).sum();
            d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = std::conj(v);
        }
        d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
            d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    }

    std::vector<std::size_t> slot_sizes;
    for (const auto& f : schedule.families) slot_sizes.push_back(f.size());
    return DecoherenceMatrix(strings, std::move(d), std::move(slot_sizes));
}

inline DecoherenceMatrix decoherence_functional(const HistorySchedule& schedule,
                                                const DensityOperator& rho) {
    return decoherence_functional(schedule, rho, enumerate_strings(schedule));
}

inline double probability(const HistorySchedule& schedule, const DensityOperator& rho,
                          const HistoryString& s) {
    const Matrix c = class_operator(schedule, s);
    const double p = (c * rho.matrix() * c.adjoint()).trace().real();
    require(p >= -1e-10 && p <= 1.0 + 1e-10, "probability: value outside [0,1] tolerance band");
    return p;
}

// Re Tr(C_s rho): equals the probability when the set decoheres.
inline double linear_positivity(const HistorySchedule& schedule, const DensityOperator& rho,
                                const HistoryString& s) {
    return (class_operator(schedule, s) * rho.matrix()).trace().real();
}

// ---------------------------------------------------------------------------
// Consistency / decoherence tests.

struct OffDiagonalReport {
    bool satisfied = true;
    double worst = 0.0;
    std::size_t worst_row = 0;
    std::size_t worst_col = 0;
};

inline OffDiagonalReport is_consistent(const DecoherenceMatrix& d, double tol) {
    OffDiagonalReport r;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j) {
            const double v = std::abs(d.entry(i, j).real());
            if (v > r.worst) {
                r.worst = v;
                r.worst_row = i;
                r.worst_col = j;
            }
        }
    r.satisfied = r.worst <= tol;
    return r;
}

inline OffDiagonalReport is_decoherent(const DecoherenceMatrix& d, double tol) {
    OffDiagonalReport r;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j) {
            const double v = std::abs(d.entry(i, j));
            if (v > r.worst) {
                r.worst = v;
                r.worst_row = i;
                r.worst_col = j;
            }
        }
    r.satisfied = r.worst <= tol;
    return r;
}

struct EpsilonReport {
    double epsilon = 0.0;
    std::size_t worst_row = 0;
    std::size_t worst_col = 0;
    std::size_t excluded_pairs = 0;  // pairs skipped for vanishing diagonals
};

// epsilon = max over pairs of |D(a,a')|^2 / (D(a,a) D(a',a')); <= 1 always.
inline EpsilonReport approx_decoherence_epsilon(const DecoherenceMatrix& d,
                                                double diag_floor = 1e-12) {
    EpsilonReport r;
    std::size_t considered = 0;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j) {
            const double pi = d.entry(i, i).real();
            const double pj = d.entry(j, j).real();
            if (pi <= diag_floor || pj <= diag_floor) {
                ++r.excluded_pairs;
                continue;
            }
            ++considered;
            const double e = std::norm(d.entry(i, j)) / (pi * pj);
            if (e > r.epsilon) {
                r.epsilon = e;
                r.worst_row = i;
                r.worst_col = j;
            }
        }
    if (d.size() > 1 && considered == 0)
        throw ValidationError(
            "approx_decoherence_epsilon: all diagonal pairs vanish; epsilon undefined");
    return r;
}

// Worst violation of p(a merged b) = p(a) + p(b) over merges of two
// alternatives differing at a single slot; equals 2|Re D| of the pair.
inline double sum_rule_violation(const DecoherenceMatrix& d) {
    double worst = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j) {
            const auto& a = d.strings()[i].alternatives;
            const auto& b = d.strings()[j].alternatives;
            int diff = 0;
            for (std::size_t k = 0; k < a.size(); ++k)
                if (a[k] != b[k]) ++diff;
            if (diff == 1) worst = std::max(worst, 2.0 * std::abs(d.entry(i, j).real()));
        }
    return worst;
}

// ---------------------------------------------------------------------------
// Coarse graining: merge alternatives a and b of the family at one slot.

inline DecoherenceMatrix merge_alternatives(const DecoherenceMatrix& d, std::size_t slot,
                                            int alt_a, int alt_b) {
    require(!d.strings().empty() && slot < d.strings().front().alternatives.size(),
            "merge_alternatives: slot out of range");
    require(alt_a != alt_b, "merge_alternatives: alternatives must differ");
    const int keep = std::min(alt_a, alt_b);
    const int drop = std::max(alt_a, alt_b);

    std::map<std::vector<int>, std::size_t> index;
    std::vector<HistoryString> merged;
    std::vector<std::size_t> to_merged(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::vector<int> alt = d.strings()[i].alternatives;
        if (alt[slot] == drop) alt[slot] = keep;
        else if (alt[slot] > drop) --alt[slot];
        auto [it, inserted] = index.try_emplace(alt, merged.size());
        if (inserted) merged.push_back(HistoryString{alt});
        to_merged[i] = it->second;
    }

    Matrix e = Matrix::Zero(static_cast<Eigen::Index>(merged.size()),
                            static_cast<Eigen::Index>(merged.size()));
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j)
            e(static_cast<Eigen::Index>(to_merged[i]), static_cast<Eigen::Index>(to_merged[j])) +=
                d.entry(i, j);

    std::vector<std::size_t> sizes = d.slot_sizes();
    if (!sizes.empty()) --sizes[slot];
    return DecoherenceMatrix(std::move(merged), std::move(e), std::move(sizes));
}

// ---------------------------------------------------------------------------
// Retrodiction from present data (final-slot alternative).

struct Retrodiction {
    int conditioned_alternative = 0;
    double present_probability = 0.0;
    std::vector<std::pair<HistoryString, double>> past;  // conditional distribution
};

inline Retrodiction retrodict(const DecoherenceMatrix& d, int final_alternative,
                              double consistency_tol = 1e-8) {
    const auto consistent = is_consistent(d, consistency_tol);
    if (!consistent.satisfied) {
        std::ostringstream os;
        os << "retrodict: set is not consistent at tol " << consistency_tol
           << " (worst off-diagonal Re = " << consistent.worst << ")";
        throw ValidationError(os.str());
    }

    Retrodiction r;
    r.conditioned_alternative = final_alternative;
    double p_present = 0.0;
    std::vector<std::pair<HistoryString, double>> matches;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto& alt = d.strings()[i].alternatives;
        if (alt.back() != final_alternative) continue;
        const double p = d.probability(i);
        p_present += p;
        HistoryString past;
        past.alternatives.assign(alt.begin(), alt.end() - 1);
        matches.emplace_back(std::move(past), p);
    }
    require(!matches.empty(), "retrodict: final alternative not present in the string set");
    require(p_present > 0.0, "retrodict: conditioning on zero-probability alternative");

    r.present_probability = p_present;
    for (auto& [past, p] : matches) r.past.emplace_back(std::move(past), p / p_present);
    return r;
}

// ---------------------------------------------------------------------------
// Shannon information I = sum p ln p (<= 0; maximal for a deterministic set).

inline double shannon_information(const std::vector<double>& probabilities) {
    double sum = 0.0;
    double info = 0.0;
    for (double p : probabilities) {
        require(p >= -1e-10, "shannon_information: negative probability");
        if (p <= 0.0) continue;
        sum += p;
        info += p * std::log(p);
    }
    require(sum <= 1.0 + 1e-9, "shannon_information: probabilities sum above 1");
    return info;
}

inline std::vector<double> diagonal_probabilities(const DecoherenceMatrix& d) {
    std::vector<double> p(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) p[i] = d.probability(i);
    return p;
}

}  // namespace dhist
