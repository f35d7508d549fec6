// ops.hpp — Small standard operators and helpers: Pauli matrices, ladder
// operators, basis projectors, Kronecker products.

#pragma once

#include <dhist/common.hpp>

#include <unsupported/Eigen/KroneckerProduct>

namespace dhist {

inline Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0.0, 1.0,
         1.0, 0.0;
    return m;
}

inline Matrix sigma_y() {
    Matrix m(2, 2);
    m << 0.0, Complex(0.0, -1.0),
         Complex(0.0, 1.0), 0.0;
    return m;
}

inline Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1.0, 0.0,
         0.0, -1.0;
    return m;
}

// |0><1|, lowers |1> (excited) to |0> (ground)
inline Matrix sigma_minus() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

inline Matrix sigma_plus() { return sigma_minus().adjoint(); }

// |i><j|
inline Matrix basis_op(Eigen::Index dim, Eigen::Index i, Eigen::Index j) {
    require(i >= 0 && i < dim && j >= 0 && j < dim, "basis_op: index out of range");
    Matrix m = Matrix::Zero(dim, dim);
    m(i, j) = 1.0;
    return m;
}

inline Vector basis_vector(Eigen::Index dim, Eigen::Index i) {
    require(i >= 0 && i < dim, "basis_vector: index out of range");
    Vector v = Vector::Zero(dim);
    v(i) = 1.0;
    return v;
}

// Projector onto the ray spanned by v (v need not be normalized).
inline Matrix ray_projector(const Vector& v) {
    const double n2 = v.squaredNorm();
    require(n2 > 0.0, "ray_projector: zero vector");
    return (v * v.adjoint()) / n2;
}

// Truncated harmonic-oscillator annihilation operator.
inline Matrix annihilation_op(Eigen::Index dim) {
    require(dim >= 2, "annihilation_op: dim must be >= 2");
    Matrix a = Matrix::Zero(dim, dim);
    for (Eigen::Index n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

inline double trace_real(const Matrix& m) { return m.trace().real(); }

// Trace distance (1/2)||a - b||_1 for hermitian a, b.
inline double trace_distance(const Matrix& a, const Matrix& b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es((a - b).eval());
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace dhist
