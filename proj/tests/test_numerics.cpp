#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "cascade/numerics.hpp"

using namespace cascade;
using namespace cascade::num;
using namespace std::complex_literals;

namespace {

MatrixXcd random_stable_matrix(int n, std::mt19937& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a(i, j) = cplx(gauss(rng), gauss(rng));
    // shift the spectrum well into the left half plane
    a -= MatrixXcd::Identity(n, n) * (3.0 * n);
    return a;
}

} // namespace

TEST_CASE("eig_dense recovers a diagonal spectrum exactly") {
    MatrixXcd a = MatrixXcd::Zero(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -2.0 - 3.0i;
    auto dec = eig_dense(a);
    // order is not part of the contract; match as a set
    bool direct = std::abs(dec.values(0) - (-1.0 + 0.0i)) < 1e-14 &&
                  std::abs(dec.values(1) - (-2.0 - 3.0i)) < 1e-14;
    bool swapped = std::abs(dec.values(1) - (-1.0 + 0.0i)) < 1e-14 &&
                   std::abs(dec.values(0) - (-2.0 - 3.0i)) < 1e-14;
    CHECK((direct || swapped));
}

TEST_CASE("eig_dense is biorthogonal and reconstructs random matrices") {
    std::mt19937 rng(1234);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + int(rng() % 8);
        MatrixXcd a = random_stable_matrix(n, rng);
        auto dec = eig_dense(a);
        MatrixXcd id = dec.left * dec.right;
        CHECK((id - MatrixXcd::Identity(n, n)).norm() < 1e-10);
        MatrixXcd rebuilt = dec.right * dec.values.asDiagonal() * dec.left;
        CHECK((rebuilt - a).norm() / a.norm() < 1e-11);
    }
}

TEST_CASE("eig_dense rejects a Jordan block as degenerate") {
    MatrixXcd a = MatrixXcd::Zero(2, 2);
    a(0, 1) = 1.0;
    CHECK_THROWS_AS(eig_dense(a), DegenerateSpectrum);
}

TEST_CASE("eig_dense rejects oversized input") {
    MatrixXcd a = MatrixXcd::Identity(17, 17);
    CHECK_THROWS_AS(eig_dense(a), InvalidParams);
}

TEST_CASE("expm_action reproduces a plane rotation") {
    // A = [[0,1],[-1,0]] generates exp(At) = [[cos t, sin t],[-sin t, cos t]]
    MatrixXcd a(2, 2);
    a << 0.0, 1.0, -1.0, 0.0;
    auto dec = eig_dense(a);
    VectorXcd v0(2);
    v0 << 1.0, 0.0;
    VectorXcd v = expm_action(dec, M_PI / 2.0, v0);
    CHECK(std::abs(v(0) - 0.0) < 1e-12);
    CHECK(std::abs(v(1) - (-1.0)) < 1e-12);
}

TEST_CASE("expm_action at t = 0 returns the input exactly") {
    std::mt19937 rng(77);
    MatrixXcd a = random_stable_matrix(5, rng);
    auto dec = eig_dense(a);
    VectorXcd v0 = VectorXcd::Random(5);
    VectorXcd v = expm_action(dec, 0.0, v0);
    CHECK((v - v0).norm() == 0.0);
}

TEST_CASE("expm_action composes: exp(A(t1+t2)) = exp(At2) exp(At1)") {
    std::mt19937 rng(99);
    MatrixXcd a = random_stable_matrix(6, rng);
    auto dec = eig_dense(a);
    VectorXcd v0 = VectorXcd::Random(6);
    VectorXcd one_shot = expm_action(dec, 0.7, v0);
    VectorXcd two_step = expm_action(dec, 0.3, expm_action(dec, 0.4, v0));
    CHECK((one_shot - two_step).norm() < 1e-12 * v0.norm());
}

TEST_CASE("expm_dense handles the defective case exactly") {
    // exp([[0,1],[0,0]]) = [[1,1],[0,1]]
    MatrixXcd a = MatrixXcd::Zero(2, 2);
    a(0, 1) = 1.0;
    MatrixXcd e = expm_dense(a);
    CHECK(std::abs(e(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(e(0, 1) - 1.0) < 1e-15);
    CHECK(std::abs(e(1, 0)) < 1e-15);
    CHECK(std::abs(e(1, 1) - 1.0) < 1e-15);
}

TEST_CASE("expm_dense agrees with the spectral exponential") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
        MatrixXcd a = random_stable_matrix(4, rng);
        a *= 0.35; // keep the exponential well conditioned
        auto dec = eig_dense(a);
        MatrixXcd via_eig = dec.right *
                            (dec.values.array().exp().matrix()).asDiagonal() * dec.left;
        MatrixXcd via_pade = expm_dense(a);
        CHECK((via_eig - via_pade).norm() < 1e-11 * via_eig.norm());
    }
}

TEST_CASE("rk4_sampled matches the exact exponential propagator") {
    std::mt19937 rng(4321);
    for (int trial = 0; trial < 5; ++trial) {
        MatrixXcd a = random_stable_matrix(4, rng);
        auto dec = eig_dense(a);
        VectorXcd v0 = VectorXcd::Random(4);
        std::vector<double> times = {0.0, 0.05, 0.31, 0.5, 1.0};
        double dt = 0.02 / a.cwiseAbs().maxCoeff();
        auto traj = rk4_sampled(a, v0, times, dt);
        REQUIRE(traj.size() == times.size());
        for (size_t k = 0; k < times.size(); ++k) {
            VectorXcd exact = expm_action(dec, times[k], v0);
            CHECK((traj[k] - exact).norm() < 1e-8 * (1.0 + exact.norm()));
        }
    }
}

TEST_CASE("rk4_sampled enforces its step bound") {
    MatrixXcd a(2, 2);
    a << -100.0, 0.0, 0.0, -1.0;
    VectorXcd v0(2);
    v0 << 1.0, 1.0;
    std::vector<double> times = {0.0, 1.0};
    CHECK_THROWS_AS(rk4_sampled(a, v0, times, 0.1), StepTooLarge);
}

TEST_CASE("gauss_hermite reproduces normal moments") {
    auto grid = gauss_hermite(15, 1.0);
    REQUIRE(grid.nodes.size() == 15);
    double w_sum = 0.0, m2 = 0.0, m4 = 0.0;
    for (size_t i = 0; i < grid.nodes.size(); ++i) {
        w_sum += grid.weights[i];
        m2 += grid.weights[i] * grid.nodes[i] * grid.nodes[i];
        m4 += grid.weights[i] * std::pow(grid.nodes[i], 4);
    }
    CHECK(std::abs(w_sum - 1.0) < 1e-12);
    CHECK(std::abs(m2 - 1.0) < 1e-10);
    CHECK(std::abs(m4 - 3.0) < 1e-8);

    // nodes come out sorted and symmetric about zero
    for (size_t i = 0; i + 1 < grid.nodes.size(); ++i) CHECK(grid.nodes[i] < grid.nodes[i + 1]);
    for (size_t i = 0; i < grid.nodes.size(); ++i)
        CHECK(std::abs(grid.nodes[i] + grid.nodes[grid.nodes.size() - 1 - i]) < 1e-12);
}

TEST_CASE("gauss_hermite handles scaling and the degenerate width") {
    auto wide = gauss_hermite(21, 3.0);
    double m2 = 0.0;
    for (size_t i = 0; i < wide.nodes.size(); ++i)
        m2 += wide.weights[i] * wide.nodes[i] * wide.nodes[i];
    CHECK(std::abs(m2 - 9.0) < 1e-9);

    auto point = gauss_hermite(7, 0.0);
    for (double x : point.nodes) CHECK(x == 0.0);
}

TEST_CASE("gauss_hermite converges on a Lorentzian average") {
    // independent oracle: dense trapezoid of phi(x)/(1+x^2) over +-10 sigma
    const int n_ref = 400001;
    std::vector<double> xs(n_ref), ys(n_ref);
    for (int i = 0; i < n_ref; ++i) {
        double x = -10.0 + 20.0 * i / (n_ref - 1);
        xs[i] = x;
        ys[i] = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI) / (1.0 + x * x);
    }
    double reference = trapezoid(xs, ys);

    auto grid = gauss_hermite(63, 1.0);
    double gh = 0.0;
    for (size_t i = 0; i < grid.nodes.size(); ++i)
        gh += grid.weights[i] / (1.0 + grid.nodes[i] * grid.nodes[i]);
    CHECK(std::abs(gh - reference) < 2e-3);
}

TEST_CASE("gauss_hermite validates the node count") {
    CHECK_THROWS_AS(gauss_hermite(0, 1.0), InvalidParams);
    CHECK_THROWS_AS(gauss_hermite(65, 1.0), InvalidParams);
}

TEST_CASE("log_linear_grid spans the window with the requested resolution") {
    auto ts = log_linear_grid(10.0, 0.01, 256);
    REQUIRE(ts.size() == 256);
    CHECK(ts.front() == 0.0);
    CHECK(ts.back() == doctest::Approx(10.0).epsilon(1e-12));
    for (size_t i = 0; i + 1 < ts.size(); ++i) CHECK(ts[i] < ts[i + 1]);
    // the geometric section actually resolves scales two decades under the knee
    int below = 0;
    for (double t : ts)
        if (t > 0.0 && t < 1e-4) ++below;
    CHECK(below >= 10);
}

TEST_CASE("trapezoid is exact on linear data and accurate on smooth data") {
    std::vector<double> xs = {0.0, 0.1, 0.35, 0.7, 1.0};
    std::vector<double> lin(xs.size()), quad(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        lin[i] = 3.0 * xs[i] + 1.0;
        quad[i] = xs[i] * xs[i];
    }
    CHECK(trapezoid(xs, lin) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(trapezoid(xs, quad) == doctest::Approx(1.0 / 3.0).epsilon(0.05));

    auto w = trapezoid_weights(xs);
    double viaw = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) viaw += w(int(i)) * quad[i];
    CHECK(viaw == doctest::Approx(trapezoid(xs, quad)).epsilon(1e-14));
}

TEST_CASE("hermite_trapezoid is exact on cubics and sharp on exponentials") {
    // cubic: integral of t^3 - 2t on [0, 1] = 1/4 - 1 = -3/4, exact even on a coarse grid
    std::vector<double> xs = {0.0, 0.3, 0.55, 0.8, 1.0};
    std::vector<double> y(xs.size()), dy(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        y[i] = xs[i] * xs[i] * xs[i] - 2.0 * xs[i];
        dy[i] = 3.0 * xs[i] * xs[i] - 2.0;
    }
    CHECK(hermite_trapezoid(xs, y, dy) == doctest::Approx(-0.75).epsilon(1e-14));

    // exponential on a modest grid: plain trapezoid ~3e-3, corrected ~3e-6
    // (composite error (h r)^4/720 per unit integral with h r = 0.25)
    std::vector<double> ts(65), e(65), de(65);
    for (int i = 0; i < 65; ++i) {
        ts[i] = 8.0 * i / 64.0;
        e[i] = std::exp(-2.0 * ts[i]);
        de[i] = -2.0 * e[i];
    }
    const double exact = 0.5 * (1.0 - std::exp(-16.0));
    CHECK(std::abs(trapezoid(ts, e) - exact) > 1e-4);
    CHECK(std::abs(hermite_trapezoid(ts, e, de) - exact) < 5e-6);

    CHECK_THROWS_AS(hermite_trapezoid(ts, e, std::vector<double>(3, 0.0)), InvalidParams);
}
