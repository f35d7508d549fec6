#include <catch2/catch_amalgamated.hpp>

#include <dhist/ops.hpp>
#include <dhist/qsd.hpp>

#include "test_helpers.hpp"

using namespace dhist;
using dhist::testing::random_hermitian;
using dhist::testing::random_pure_state;

namespace {

// Gauss-Hermite nodes/weights for E[f(g)], g ~ N(0,1), via Golub-Welsch.
struct GaussHermite {
    std::vector<double> nodes, weights;
    explicit GaussHermite(int n) {
        RealMatrix j = RealMatrix::Zero(n, n);
        for (int k = 1; k < n; ++k) {
            const double b = std::sqrt(0.5 * k);
            j(k - 1, k) = b;
            j(k, k - 1) = b;
        }
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(j);
        for (int k = 0; k < n; ++k) {
            nodes.push_back(std::sqrt(2.0) * es.eigenvalues()(k));  // g = sqrt(2) x
            weights.push_back(es.eigenvectors()(0, k) * es.eigenvectors()(0, k));
        }
    }
};

// Exact noise average of one renormalized Euler-Maruyama step (one channel).
Matrix exact_step_mean(const LindbladModel& model, const StateVector& psi, double dt, int n_gh) {
    const GaussHermite gh(n_gh);
    Matrix mean = Matrix::Zero(psi.dim(), psi.dim());
    const double s = std::sqrt(0.5 * dt);
    for (int a = 0; a < n_gh; ++a)
        for (int b = 0; b < n_gh; ++b) {
            const Complex dxi(s * gh.nodes[a], s * gh.nodes[b]);
            const StateVector next = qsd_step(model, psi, dt, std::span(&dxi, 1));
            mean += gh.weights[a] * gh.weights[b] *
                    (next.amplitudes() * next.amplitudes().adjoint());
        }
    return mean;
}

}  // namespace

TEST_CASE("qsd_step without noise is a renormalized Euler step") {
    std::mt19937_64 gen(307);
    const Matrix h = random_hermitian(3, gen);
    const StateVector psi = random_pure_state(3, gen);
    const LindbladModel model(h, {Matrix::Zero(3, 3)});
    const double dt = 1e-3;

    const Complex zero_noise(0.0, 0.0);
    const StateVector got = qsd_step(model, psi, dt, std::span(&zero_noise, 1));

    Vector expect = psi.amplitudes() +
                    (Complex(0.0, -1.0) * dt) * (h * psi.amplitudes());
    expect /= expect.norm();
    CHECK((got.amplitudes() - expect).norm() < 1e-14);
}

TEST_CASE("eigenstates of a hermitian lindblad are fixed points") {
    const LindbladModel model(Matrix::Zero(2, 2), {1.7 * sigma_z()});
    const StateVector up(basis_vector(2, 0));
    const Complex noise(0.4, -0.3);  // arbitrary, must not matter
    const StateVector next = qsd_step(model, up, 0.01, std::span(&noise, 1));
    CHECK((next.amplitudes() - up.amplitudes()).norm() < 1e-14);
}

TEST_CASE("norm-collapse guard") {
    // 0.5 |L|^2 dt = 1 cancels the excited amplitude exactly; with zero noise
    // nothing is left to renormalize
    const double c = 200.0;
    const LindbladModel model(Matrix::Zero(2, 2), {c * sigma_minus()});
    const StateVector psi(basis_vector(2, 1));
    const Complex noise(0.0, 0.0);
    CHECK_THROWS_AS(qsd_step(model, psi, 2.0 / (c * c), std::span(&noise, 1)),
                    NumericalGuardError);
}

TEST_CASE("single-step noise mean recovers the lindblad generator") {
    std::mt19937_64 gen(311);
    const Matrix h = random_hermitian(2, gen);
    const Matrix l = 0.8 * sigma_minus() + 0.3 * sigma_z();
    const LindbladModel model(h, {l});
    const StateVector psi = random_pure_state(2, gen);
    const Matrix rho = psi.amplitudes() * psi.amplitudes().adjoint();
    const Matrix gen_rho = lindblad_generator(model, rho);

    // quadrature mean: residual after one step is O(dt^2) with stable constant
    const double dt1 = 0.02;
    const double r1 = (exact_step_mean(model, psi, dt1, 48) - rho - dt1 * gen_rho).norm();
    const double r2 =
        (exact_step_mean(model, psi, 0.5 * dt1, 48) - rho - 0.5 * dt1 * gen_rho).norm();
    const double c1 = r1 / (dt1 * dt1);
    const double c2 = r2 / (0.25 * dt1 * dt1);
    CHECK(std::abs(c2 / c1 - 1.0) < 0.25);

    // sampled mean over 1e5 draws agrees within the statistical band
    const int n_draws = 100000;
    const double dt = 0.05;
    Matrix mean = Matrix::Zero(2, 2);
    double sq = 0.0;
    for (int i = 0; i < n_draws; ++i) {
        const Complex dxi = qsd_noise_increment(999, 0, static_cast<std::uint64_t>(i), 0, dt);
        const StateVector next = qsd_step(model, psi, dt, std::span(&dxi, 1));
        const Matrix contrib = next.amplitudes() * next.amplitudes().adjoint();
        mean += contrib;
        sq += (contrib - rho).squaredNorm();
    }
    mean /= n_draws;
    const double stderr_est = std::sqrt(sq / n_draws / n_draws);
    const double residual = ((mean - rho) / dt - gen_rho).norm();
    CHECK(residual < c1 * dt + 5.0 * stderr_est / dt);
}

TEST_CASE("single-trajectory ensemble without noise equals unitary evolution") {
    std::mt19937_64 gen(313);
    const Matrix h = random_hermitian(2, gen);
    const StateVector psi0 = random_pure_state(2, gen);
    const LindbladModel model(h);

    const auto ens = qsd_ensemble(model, psi0, 1e-4, 200, 1, 42, 50);
    const Matrix u = unitary_propagator(h, 0.02);
    const Matrix expect = u * psi0.amplitudes() * psi0.amplitudes().adjoint() * u.adjoint();
    CHECK((ens.rho_mean.back() - expect).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("amplitude-damping ensemble tracks the master equation") {
    const double gamma = 1.0;
    const LindbladModel model(Matrix::Zero(2, 2), {std::sqrt(gamma) * sigma_minus()});
    Vector init(2);
    init << Complex(0.6, 0.0), Complex(0.0, 0.8);
    const StateVector psi0 = StateVector::normalized(init);

    const double dt = 1e-3;
    const int steps = 1000;
    const auto ens = qsd_ensemble(model, psi0, dt, steps, 500, 20260810, 200);
    const auto master = lindblad_evolve(model, DensityOperator::pure(psi0), dt, steps, 200);

    REQUIRE(ens.times.size() == master.times.size());
    for (std::size_t r = 0; r < ens.times.size(); ++r)
        CHECK(trace_distance(ens.rho_mean[r], master.states[r].matrix()) < 0.1);
}

TEST_CASE("ensemble mean is bitwise identical across thread counts") {
    const LindbladModel model(0.3 * sigma_x(), {0.7 * sigma_minus()});
    const StateVector psi0(basis_vector(2, 1));
    const auto e1 = qsd_ensemble(model, psi0, 1e-3, 100, 97, 7, 25, {}, 1);
    const auto e2 = qsd_ensemble(model, psi0, 1e-3, 100, 97, 7, 25, {}, 2);
    const auto e8 = qsd_ensemble(model, psi0, 1e-3, 100, 97, 7, 25, {}, 8);
    for (std::size_t r = 0; r < e1.rho_mean.size(); ++r) {
        CHECK((e1.rho_mean[r] - e2.rho_mean[r]).cwiseAbs().maxCoeff() == 0.0);
        CHECK((e1.rho_mean[r] - e8.rho_mean[r]).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("trajectories of a localizing lindblad collapse while the mean stays spread") {
    // truncated oscillator with a damping-type lindblad, cat-like initial state
    const int d = 8;
    const Matrix a = annihilation_op(d);
    const Matrix x_op = (a + a.adjoint()) / std::sqrt(2.0);
    const Matrix p_op = (a - a.adjoint()) / Complex(0.0, std::sqrt(2.0));
    const double kappa = 0.8;
    const LindbladModel model(Matrix::Zero(d, d),
                              {std::sqrt(kappa) * (x_op + Complex(0.0, 0.25) * p_op)});

    const double alpha = 1.4;
    Vector cat = Vector::Zero(d);
    double fact = 1.0;
    for (int n = 0; n < d; ++n) {
        if (n > 0) fact *= n;
        const double amp = std::pow(alpha, n) / std::sqrt(fact);
        cat(n) = amp * ((n % 2 == 0) ? 2.0 : 0.0);  // |alpha> + |-alpha>: odd terms cancel
    }
    const StateVector psi0 = StateVector::normalized(cat);

    const double dt = 2.5e-4;
    const int steps = 2400;  // t = 0.6: each trajectory sits on one lobe
    const int n_traj = 150;
    const auto ens = qsd_ensemble(model, psi0, dt, steps, n_traj, 555, steps,
                                  {{"x", x_op}, {"x2", x_op * x_op}});

    const std::size_t last = ens.times.size() - 1;
    double mean_traj_var = 0.0;
    double mean_abs_centroid = 0.0;
    for (int i = 0; i < n_traj; ++i) {
        const double x = ens.observable_values[0][last][i];
        const double x2 = ens.observable_values[1][last][i];
        mean_traj_var += x2 - x * x;
        mean_abs_centroid += std::abs(x);
    }
    mean_traj_var /= n_traj;
    mean_abs_centroid /= n_traj;

    const Matrix& rho = ens.rho_mean[last];
    const double mx = (x_op * rho).trace().real();
    const double mx2 = (x_op * x_op * rho).trace().real();
    const double ensemble_var = mx2 - mx * mx;

    CHECK(mean_traj_var < 0.3 * ensemble_var);
    CHECK(mean_abs_centroid > 1.0);  // trajectories sit on a lobe, not in between
}
