// records.hpp — Record projectors at the final time, perfectly correlated with
// a decoherent set of histories of a pure initial state.

#pragma once

#include <dhist/histories.hpp>

#include <sstream>
#include <vector>

namespace dhist {

inline constexpr double kTolBranch = 1e-12;  // branches below this norm carry no record

// Records are stored as Heisenberg-picture projectors at the final time; the
// Schrodinger-picture record at t_n is U R U^dag with U = exp(-iH(t_n-t0)/hbar).
struct RecordSet {
    std::vector<Matrix> projectors;  // one per history string (zero-branch: unused)
    std::vector<bool> has_record;    // false -> string maps to the residual projector
    Matrix residual;                 // projector on the subspace no branch spans
    double tol = 1e-8;

    const Matrix& record_for(std::size_t s) const {
        return has_record.at(s) ? projectors.at(s) : residual;
    }
    std::size_t size() const { return projectors.size(); }
};

// Orthogonality/completeness of the record projectors themselves.
inline void validate_record_set(const RecordSet& records, Eigen::Index dim,
                                double tol = kTolStructural) {
    Matrix sum = records.residual;
    require(is_projector(records.residual, tol), "RecordSet: residual is not a projector");
    std::vector<const Matrix*> active;
    for (std::size_t s = 0; s < records.size(); ++s)
        if (records.has_record[s]) active.push_back(&records.projectors[s]);
    for (std::size_t i = 0; i < active.size(); ++i) {
        require(is_projector(*active[i], tol), "RecordSet: member is not a projector");
        sum += *active[i];
        for (std::size_t j = i + 1; j < active.size(); ++j)
            require((*active[i] * *active[j]).cwiseAbs().maxCoeff() <= tol,
                    "RecordSet: members not orthogonal");
        require((*active[i] * records.residual).cwiseAbs().maxCoeff() <= tol,
                "RecordSet: member overlaps residual");
    }
    require((sum - identity(dim)).cwiseAbs().maxCoeff() <= tol,
            "RecordSet: projectors do not sum to identity");
}

// Build records R_s as ray projectors on the orthonormalized branches C_s|psi>.
// Refuses mixed states and non-decoherent sets.
inline RecordSet construct_records(const HistorySchedule& schedule, const StateVector& psi,
                                   double tol = 1e-8) {
    const DensityOperator rho = DensityOperator::pure(psi);
    const DecoherenceMatrix d = decoherence_functional(schedule, rho);
    const auto deco = is_decoherent(d, tol);
    if (!deco.satisfied) {
        std::ostringstream os;
        os << "construct_records: set not decoherent at tol " << tol
           << " (worst off-diagonal |D| = " << deco.worst << " at pair " << deco.worst_row
           << "," << deco.worst_col << ")";
        throw ValidationError(os.str());
    }

    const auto strings = d.strings();
    std::vector<Vector> branches(strings.size());
    for (std::size_t s = 0; s < strings.size(); ++s)
        branches[s] = class_operator(schedule, strings[s]) * psi.amplitudes();

    RecordSet records;
    records.tol = tol;
    records.projectors.assign(strings.size(), Matrix());
    records.has_record.assign(strings.size(), false);

    // Modified Gram-Schmidt with a re-orthogonalization pass.
    std::vector<Vector> basis;
    for (std::size_t s = 0; s < strings.size(); ++s) {
        if (branches[s].norm() < kTolBranch) continue;
        Vector v = branches[s];
        for (int pass = 0; pass < 2; ++pass)
            for (const Vector& q : basis) v -= q * (q.dot(v));
        const double n = v.norm();
        require(n >= kTolBranch,
                "construct_records: branch collapsed under orthogonalization; "
                "set is not decoherent enough for ray records");
        v /= n;
        basis.push_back(v);
        records.projectors[s] = v * v.adjoint();
        records.has_record[s] = true;
    }

    Matrix span = Matrix::Zero(schedule.dim(), schedule.dim());
    for (std::size_t s = 0; s < strings.size(); ++s)
        if (records.has_record[s]) span += records.projectors[s];
    records.residual = identity(schedule.dim()) - span;
    return records;
}

// Tr(R_b C_s |psi><psi| C_s^dag): zero unless b = s, then the history probability.
// record_index == records.size() selects the residual projector.
inline double joint_probability(const HistorySchedule& schedule, const StateVector& psi,
                                const RecordSet& records, const HistoryString& s,
                                std::size_t record_index) {
    require(record_index <= records.size(), "joint_probability: record index out of range");
    const Vector branch = class_operator(schedule, s) * psi.amplitudes();
    const Matrix& r = (record_index == records.size()) ? records.residual
                                                       : records.record_for(record_index);
    return (branch.adjoint() * r * branch).value().real();
}

struct RecordsReport {
    double max_reconstructed_offdiag = 0.0;   // off-diagonals of the record-sum form of D
    double max_correlation_violation = 0.0;   // Tr(R_b C_a rho C_a^dag) mass with b != a
    double max_diagonal_mismatch = 0.0;       // record-vs-history probability mismatch
    double max_final_time_mismatch = 0.0;     // Tr(R_a rho(t_n)) vs Tr(C_a rho C_a^dag)
    bool pass = false;
    double tol = 1e-8;
    // (record index, string index, stray mass) for violating pairs
    std::vector<std::tuple<std::size_t, std::size_t, double>> failures;
};

inline RecordsReport records_imply_decoherence(const HistorySchedule& schedule,
                                               const DensityOperator& rho,
                                               const RecordSet& records, double tol = 1e-8) {
    validate_record_set(records, schedule.dim());
    const auto strings = enumerate_strings(schedule);
    require(records.size() == strings.size(),
            "records_imply_decoherence: record set does not match the string count");

    std::vector<Matrix> chain(strings.size());
    for (std::size_t s = 0; s < strings.size(); ++s)
        chain[s] = class_operator(schedule, strings[s]);

    RecordsReport report;
    report.tol = tol;

    // Correlation: stray record mass on foreign branches.
    for (std::size_t b = 0; b < records.size(); ++b) {
        if (!records.has_record[b]) continue;
        for (std::size_t a = 0; a < strings.size(); ++a) {
            const double mass =
                (records.projectors[b] * chain[a] * rho.matrix() * chain[a].adjoint())
                    .trace()
                    .real();
            if (b == a) {
                const double p = (chain[a] * rho.matrix() * chain[a].adjoint()).trace().real();
                report.max_diagonal_mismatch =
                    std::max(report.max_diagonal_mismatch, std::abs(mass - p));
            } else if (std::abs(mass) > report.max_correlation_violation) {
                report.max_correlation_violation = std::abs(mass);
                if (std::abs(mass) > tol) report.failures.emplace_back(b, a, mass);
            }
        }
    }

    // D reconstructed through the record sum; off-diagonals must vanish.
    for (std::size_t a = 0; a < strings.size(); ++a) {
        const Matrix a_rho = chain[a] * rho.matrix();
        for (std::size_t ap = 0; ap < strings.size(); ++ap) {
            if (a == ap) continue;
            Complex sum = 0.0;
            for (std::size_t b = 0; b < records.size(); ++b) {
                if (!records.has_record[b]) continue;
                sum += (records.projectors[b] * a_rho * chain[ap].adjoint()).trace();
            }
            sum += (records.residual * a_rho * chain[ap].adjoint()).trace();
            report.max_reconstructed_offdiag =
                std::max(report.max_reconstructed_offdiag, std::abs(sum));
        }
    }

    // Final-time form: Tr(R_a rho(t_n)) against the chain probability.
    const Matrix u = unitary_propagator(schedule.hamiltonian, schedule.times.back() - schedule.t0,
                                        schedule.hbar);
    const Matrix rho_tn = u * rho.matrix() * u.adjoint();
    for (std::size_t a = 0; a < strings.size(); ++a) {
        if (!records.has_record[a]) continue;
        const Matrix r_schrod = u * records.projectors[a] * u.adjoint();
        const double via_record = (r_schrod * rho_tn).trace().real();
        const double via_chain = (chain[a] * rho.matrix() * chain[a].adjoint()).trace().real();
        report.max_final_time_mismatch =
            std::max(report.max_final_time_mismatch, std::abs(via_record - via_chain));
    }

    report.pass = report.max_reconstructed_offdiag <= tol &&
                  report.max_correlation_violation <= tol &&
                  report.max_diagonal_mismatch <= tol &&
                  report.max_final_time_mismatch <= tol;
    return report;
}

}  // namespace dhist
