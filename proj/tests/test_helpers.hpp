// test_helpers.hpp — Seeded random states, operators and families for tests.

#pragma once

#include <dhist/operator_algebra.hpp>

#include <random>

namespace dhist::testing {

inline Matrix random_ginibre(Eigen::Index n, std::mt19937_64& gen) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(nd(gen), nd(gen));
    return m;
}

inline Matrix random_unitary(Eigen::Index n, std::mt19937_64& gen) {
    Eigen::HouseholderQR<Matrix> qr(random_ginibre(n, gen));
    Matrix q = qr.householderQ();
    // fix phases so Q is Haar-ish
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex d = r(i, i);
        if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
    }
    return q;
}

inline Matrix random_hermitian(Eigen::Index n, std::mt19937_64& gen) {
    const Matrix g = random_ginibre(n, gen);
    return 0.5 * (g + g.adjoint());
}

inline StateVector random_pure_state(Eigen::Index n, std::mt19937_64& gen) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(nd(gen), nd(gen));
    return StateVector::normalized(v);
}

inline DensityOperator random_density(Eigen::Index n, std::mt19937_64& gen) {
    const Matrix g = random_ginibre(n, gen);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityOperator(std::move(rho));
}

// Random exhaustive family with the given number of members: random unitary
// columns grouped into blocks.
inline ProjectorFamily random_family(Eigen::Index dim, int n_members, std::mt19937_64& gen) {
    const Matrix u = random_unitary(dim, gen);
    std::vector<Matrix> members;
    Eigen::Index col = 0;
    for (int m = 0; m < n_members; ++m) {
        const Eigen::Index take = (m == n_members - 1)
                                      ? dim - col
                                      : std::max<Eigen::Index>(1, dim / n_members);
        Matrix p = Matrix::Zero(dim, dim);
        for (Eigen::Index k = 0; k < take; ++k, ++col) p += u.col(col) * u.col(col).adjoint();
        members.push_back(std::move(p));
    }
    return ProjectorFamily(std::move(members));
}

}  // namespace dhist::testing
