#include <catch2/catch_amalgamated.hpp>

#include <dhist/lindblad.hpp>
#include <dhist/ops.hpp>

#include "test_helpers.hpp"

using namespace dhist;
using dhist::testing::random_density;
using dhist::testing::random_ginibre;
using dhist::testing::random_hermitian;
using dhist::testing::random_pure_state;

TEST_CASE("empty lindblad list reproduces unitary evolution") {
    std::mt19937_64 gen(211);
    const Matrix h = random_hermitian(4, gen);
    const DensityOperator rho0 = random_density(4, gen);
    const LindbladModel model(h);

    const auto run = lindblad_evolve(model, rho0, 1e-3, 1000, 250);
    const Matrix u = unitary_propagator(h, 1.0);
    const Matrix expect = u * rho0.matrix() * u.adjoint();
    CHECK(approx_equal(run.states.back().matrix(), expect, 1e-8));
}

TEST_CASE("amplitude damping matches the closed form") {
    const double gamma = 1.0;
    Matrix rho0 = Matrix::Zero(2, 2);
    rho0(0, 0) = 0.3;
    rho0(1, 1) = 0.7;
    rho0(0, 1) = Complex(0.2, 0.1);
    rho0(1, 0) = std::conj(rho0(0, 1));

    const LindbladModel model(Matrix::Zero(2, 2), {std::sqrt(gamma) * sigma_minus()});
    const double dt = 1e-3 / gamma;
    const int steps = 2000;  // gamma t = 2
    const auto run = lindblad_evolve(model, DensityOperator(rho0), dt, steps, 100);

    for (std::size_t r = 0; r < run.times.size(); ++r) {
        const double t = run.times[r];
        const Matrix& m = run.states[r].matrix();
        CHECK(std::abs(m(1, 1).real() - 0.7 * std::exp(-gamma * t)) < 1e-6);
        CHECK(std::abs(m(0, 1) - rho0(0, 1) * std::exp(-0.5 * gamma * t)) < 1e-6);
    }
    CHECK(run.max_trace_drift < 1e-8);
}

TEST_CASE("pure dephasing damps coherences at 2 kappa") {
    const double kappa = 0.8;
    Vector plus(2);
    plus << 1.0, 1.0;
    const DensityOperator rho0 = DensityOperator::pure(StateVector::normalized(plus));
    const LindbladModel model(Matrix::Zero(2, 2), {std::sqrt(kappa) * sigma_z()});

    const auto run = lindblad_evolve(model, rho0, 5e-4, 2000, 500);
    for (std::size_t r = 0; r < run.times.size(); ++r) {
        const double t = run.times[r];
        CHECK(std::abs(std::abs(run.states[r].matrix()(0, 1)) -
                       0.5 * std::exp(-2.0 * kappa * t)) < 1e-6);
    }
}

TEST_CASE("random models preserve trace, hermiticity and positivity") {
    std::mt19937_64 gen(223);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index d = 2 + trial % 7;
        std::vector<Matrix> ls;
        for (int j = 0; j <= trial % 3; ++j) ls.push_back(0.5 * random_ginibre(d, gen));
        const LindbladModel model(random_hermitian(d, gen), ls);
        const auto run = lindblad_evolve(model, random_density(d, gen), 2e-4, 500, 100);
        CHECK(run.max_trace_drift < 1e-8);
        for (const auto& st : run.states) {
            CHECK(hermiticity_defect(st.matrix()) < 1e-10);
            CHECK(st.min_eigenvalue() > -1e-7);
        }
    }
}

TEST_CASE("step-size warning and trace guard") {
    const LindbladModel model(Matrix::Zero(2, 2), {3.0 * sigma_minus()});
    const DensityOperator rho0 = DensityOperator::pure(StateVector(basis_vector(2, 1)));

    const auto run = lindblad_evolve(model, rho0, 0.05, 1, 1);
    CHECK_FALSE(run.warnings.empty());  // dt * scale above 0.1

    // far beyond the stability boundary the trace runs away and the guard trips
    CHECK_THROWS_AS(lindblad_evolve(model, rho0, 0.9, 200, 1), NumericalGuardError);
}
