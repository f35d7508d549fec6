// operator_algebra.hpp — States, density operators, projector families and the
// basic evolution/trace operations on a finite-dimensional Hilbert space.

#pragma once

#include <dhist/common.hpp>

#include <unsupported/Eigen/MatrixFunctions>

#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace dhist {

// ---------------------------------------------------------------------------
// StateVector: normalized complex amplitudes.

class StateVector {
public:
    explicit StateVector(Vector amplitudes, double tol_norm = 1e-10)
        : amp_(std::move(amplitudes)) {
        require(amp_.size() > 0, "StateVector: empty amplitude vector");
        const double n = amp_.norm();
        if (std::abs(n - 1.0) > tol_norm) {
            std::ostringstream os;
            os << "StateVector: norm " << n << " deviates from 1 by more than " << tol_norm;
            throw ValidationError(os.str());
        }
    }

    static StateVector normalized(const Vector& v) {
        const double n = v.norm();
        require(n > 0.0, "StateVector::normalized: zero vector");
        return StateVector(v / n);
    }

    Eigen::Index dim() const { return amp_.size(); }
    const Vector& amplitudes() const { return amp_; }
    Complex operator()(Eigen::Index i) const { return amp_(i); }

private:
    Vector amp_;
};

// ---------------------------------------------------------------------------
// DensityOperator: hermitian, unit trace, positive within tolerance.

class DensityOperator {
public:
    explicit DensityOperator(Matrix rho, double tol = kTolStructural, double eigen_floor = -1e-10)
        : mat_(std::move(rho)) {
        require(mat_.rows() == mat_.cols() && mat_.rows() > 0,
                "DensityOperator: matrix must be square and non-empty");
        const double herm = hermiticity_defect(mat_);
        if (herm > tol) {
            std::ostringstream os;
            os << "DensityOperator: hermiticity defect " << herm;
            throw ValidationError(os.str());
        }
        const double tr_err = std::abs(mat_.trace() - Complex(1.0, 0.0));
        if (tr_err > tol) {
            std::ostringstream os;
            os << "DensityOperator: trace deviates from 1 by " << tr_err;
            throw ValidationError(os.str());
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
        min_eig_ = es.eigenvalues().minCoeff();
        if (min_eig_ < eigen_floor) {
            std::ostringstream os;
            os << "DensityOperator: negative eigenvalue " << min_eig_;
            throw ValidationError(os.str());
        }
    }

    static DensityOperator pure(const StateVector& psi) {
        return DensityOperator(psi.amplitudes() * psi.amplitudes().adjoint());
    }

    static DensityOperator maximally_mixed(Eigen::Index dim) {
        return DensityOperator(Matrix::Identity(dim, dim) / static_cast<double>(dim));
    }

    Eigen::Index dim() const { return mat_.rows(); }
    const Matrix& matrix() const { return mat_; }
    double min_eigenvalue() const { return min_eig_; }

private:
    Matrix mat_;
    double min_eig_ = 0.0;
};

// ---------------------------------------------------------------------------
// ProjectorFamily: exhaustive, exclusive alternatives.

class ProjectorFamily {
public:
    ProjectorFamily(std::vector<Matrix> members, std::vector<std::string> labels = {},
                    double tol = kTolStructural)
        : members_(std::move(members)), labels_(std::move(labels)) {
        require(!members_.empty(), "ProjectorFamily: no members");
        dim_ = members_.front().rows();
        if (labels_.empty()) {
            for (std::size_t i = 0; i < members_.size(); ++i)
                labels_.push_back(std::to_string(i));
        }
        require(labels_.size() == members_.size(), "ProjectorFamily: label count mismatch");

        Matrix sum = Matrix::Zero(dim_, dim_);
        for (std::size_t i = 0; i < members_.size(); ++i) {
            const Matrix& p = members_[i];
            require(p.rows() == dim_ && p.cols() == dim_, "ProjectorFamily: dimension mismatch");
            const double defect = projector_defect(p);
            if (defect > tol) {
                std::ostringstream os;
                os << "ProjectorFamily: member " << i << " projector defect " << defect;
                throw ValidationError(os.str());
            }
            sum += p;
        }
        for (std::size_t i = 0; i < members_.size(); ++i)
            for (std::size_t j = i + 1; j < members_.size(); ++j) {
                const double cross = (members_[i] * members_[j]).cwiseAbs().maxCoeff();
                if (cross > tol) {
                    std::ostringstream os;
                    os << "ProjectorFamily: members " << i << "," << j
                       << " not orthogonal (|PiPj| = " << cross << ")";
                    throw ValidationError(os.str());
                }
            }
        const double complete = (sum - identity(dim_)).cwiseAbs().maxCoeff();
        if (complete > tol) {
            std::ostringstream os;
            os << "ProjectorFamily: members sum deviates from identity by " << complete;
            throw ValidationError(os.str());
        }
    }

    Eigen::Index dim() const { return dim_; }
    std::size_t size() const { return members_.size(); }
    const Matrix& member(std::size_t i) const { return members_.at(i); }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    const std::vector<Matrix>& members() const { return members_; }

    // {P, 1-P}
    static ProjectorFamily two_outcome(const Matrix& p, const std::string& yes = "1",
                                       const std::string& no = "0") {
        return ProjectorFamily({p, identity(p.rows()) - p}, {yes, no});
    }

private:
    Eigen::Index dim_ = 0;
    std::vector<Matrix> members_;
    std::vector<std::string> labels_;
};

// Eigenprojectors of a hermitian operator, grouped by eigenvalue clusters.
inline ProjectorFamily spectral_family(const Matrix& a, double cluster_tol = 1e-8) {
    require(is_hermitian(a), "spectral_family: operator not hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    const RealVector& vals = es.eigenvalues();
    const Matrix& vecs = es.eigenvectors();

    std::vector<Matrix> members;
    std::vector<std::string> labels;
    Eigen::Index i = 0;
    while (i < vals.size()) {
        Eigen::Index j = i;
        while (j + 1 < vals.size() && vals(j + 1) - vals(i) <= cluster_tol) ++j;
        Matrix p = Matrix::Zero(a.rows(), a.cols());
        for (Eigen::Index k = i; k <= j; ++k) p += vecs.col(k) * vecs.col(k).adjoint();
        members.push_back(std::move(p));
        labels.push_back(std::to_string(labels.size()));
        i = j + 1;
    }
    return ProjectorFamily(std::move(members), std::move(labels));
}

// ---------------------------------------------------------------------------
// Matrix exponential and unitary evolution.

// General path: scaling-and-squaring with Pade approximant.
inline Matrix matrix_exp(const Matrix& a) {
    require(a.rows() == a.cols(), "matrix_exp: matrix must be square");
    return a.exp();
}

// exp(-i H t / hbar) for hermitian H via eigendecomposition.
inline Matrix unitary_propagator(const Matrix& h, double t, double hbar = 1.0) {
    const double herm = hermiticity_defect(h);
    if (herm > kTolStructural) {
        std::ostringstream os;
        os << "unitary_propagator: H not hermitian, defect " << herm;
        throw ValidationError(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const RealVector& vals = es.eigenvalues();
    const Matrix& vecs = es.eigenvectors();
    Vector phases(vals.size());
    for (Eigen::Index k = 0; k < vals.size(); ++k)
        phases(k) = std::exp(Complex(0.0, -vals(k) * t / hbar));
    return vecs * phases.asDiagonal() * vecs.adjoint();
}

inline StateVector evolve_unitary(const Matrix& h, double t, const StateVector& psi,
                                  double hbar = 1.0) {
    require(h.rows() == psi.dim(), "evolve_unitary: dimension mismatch");
    const Vector out = unitary_propagator(h, t, hbar) * psi.amplitudes();
    return StateVector(out);
}

// Heisenberg-picture operator e^{+iH(t-t0)/hbar} P e^{-iH(t-t0)/hbar}.
inline Matrix heisenberg_projector(const Matrix& p, const Matrix& h, double t, double t0 = 0.0,
                                   double hbar = 1.0) {
    require(is_projector(p), "heisenberg_projector: P is not a projector");
    const Matrix u = unitary_propagator(h, t - t0, hbar);
    return u.adjoint() * p * u;
}

// ---------------------------------------------------------------------------
// Partial trace over the environment factor of H_sys (x) H_env.

inline DensityOperator partial_trace_env(const DensityOperator& rho_joint, Eigen::Index d_sys,
                                         Eigen::Index d_env) {
    require(d_sys >= 1 && d_env >= 1, "partial_trace_env: factor dims must be positive");
    require(rho_joint.dim() == d_sys * d_env,
            "partial_trace_env: joint dim does not equal d_sys * d_env");
    const Matrix& rho = rho_joint.matrix();
    Matrix out = Matrix::Zero(d_sys, d_sys);
    for (Eigen::Index s = 0; s < d_sys; ++s)
        for (Eigen::Index t = 0; t < d_sys; ++t) {
            Complex acc = 0.0;
            for (Eigen::Index e = 0; e < d_env; ++e) acc += rho(s * d_env + e, t * d_env + e);
            out(s, t) = acc;
        }
    return DensityOperator(std::move(out));
}

}  // namespace dhist
