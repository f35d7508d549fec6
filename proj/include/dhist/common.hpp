// common.hpp — Shared aliases, error types and numeric tolerances

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace dhist {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

// Structural checks (hermiticity, idempotency, completeness, trace).
inline constexpr double kTolStructural = 1e-10;
// Drift allowed for propagators and chained evolutions.
inline constexpr double kTolEvolution = 1e-9;

// Invalid inputs: bad dimensions, violated preconditions, malformed scenarios.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Tripped runtime guards: trace drift, norm collapse, undersampling, blow-up.
class NumericalGuardError : public std::runtime_error {
public:
    explicit NumericalGuardError(const std::string& msg) : std::runtime_error(msg) {}
};

inline bool approx_equal(const Matrix& a, const Matrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return (a - b).cwiseAbs().maxCoeff() <= tol;
}

inline double hermiticity_defect(const Matrix& a) {
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Matrix& a, double tol = kTolStructural) {
    return a.rows() == a.cols() && hermiticity_defect(a) <= tol;
}

// max |P^2 - P|, max |P - P^dag|
inline double projector_defect(const Matrix& p) {
    const double idem = (p * p - p).cwiseAbs().maxCoeff();
    return std::max(idem, hermiticity_defect(p));
}

inline bool is_projector(const Matrix& p, double tol = kTolStructural) {
    return p.rows() == p.cols() && projector_defect(p) <= tol;
}

inline Matrix identity(Eigen::Index dim) { return Matrix::Identity(dim, dim); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

inline void guard(bool cond, const std::string& msg) {
    if (!cond) throw NumericalGuardError(msg);
}

}  // namespace dhist
