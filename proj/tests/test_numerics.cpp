#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "grind/numerics.hpp"

using namespace grind;
using Catch::Approx;

namespace {

ComplexMatrix random_complex(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(normal(rng), normal(rng));
    return m;
}

}  // namespace

TEST_CASE("solve_complex_lls identity system") {
    ComplexMatrix A = ComplexMatrix::Identity(3, 3);
    ComplexVector b(3);
    b << Complex(1, 0), Complex(0, 2), Complex(-1, 0);
    ComplexVector c = solve_complex_lls(A, b, 0.0);
    REQUIRE((c - b).norm() == Approx(0.0).margin(1e-14));
}

TEST_CASE("solve_complex_lls overdetermined mean") {
    ComplexMatrix A(2, 1);
    A << Complex(1, 0), Complex(1, 0);
    ComplexVector b(2);
    b << Complex(1, 0), Complex(3, 0);
    ComplexVector c = solve_complex_lls(A, b, 0.0);
    REQUIRE(c.size() == 1);
    REQUIRE(c[0].real() == Approx(2.0).margin(1e-14));
    REQUIRE(c[0].imag() == Approx(0.0).margin(1e-14));
}

TEST_CASE("solve_complex_lls recovers a planted solution") {
    ComplexMatrix A = random_complex(20, 5, 11);
    ComplexVector truth = random_complex(5, 1, 12);
    ComplexVector c = solve_complex_lls(A, A * truth, 0.0);
    REQUIRE((c - truth).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("solve_complex_lls satisfies the normal equations on full-rank systems") {
    ComplexMatrix A = random_complex(30, 8, 21);
    ComplexVector b = random_complex(30, 1, 22);
    ComplexVector c = solve_complex_lls(A, b, 0.0);
    const double residual = (A.adjoint() * (A * c - b)).norm();
    REQUIRE(residual < 1e-8 * (A.adjoint() * b).norm());
}

TEST_CASE("solve_complex_lls returns the minimum-norm solution when rank-deficient") {
    // duplicate columns: any solution c with c0 + c1 fixed works, min-norm splits evenly
    ComplexMatrix A(4, 2);
    A.col(0) = random_complex(4, 1, 31);
    A.col(1) = A.col(0);
    ComplexVector b = A.col(0) * Complex(2.0, 1.0);
    ComplexVector c = solve_complex_lls(A, b, 0.0);
    REQUIRE(std::abs(c[0] - c[1]) < 1e-10);
    REQUIRE(std::abs(c[0] + c[1] - Complex(2.0, 1.0)) < 1e-9);
}

TEST_CASE("ridge shrinks the solution norm monotonically") {
    ComplexMatrix A = random_complex(12, 6, 41);
    ComplexVector b = random_complex(12, 1, 42);
    double prev = solve_complex_lls(A, b, 0.0).norm();
    for (double ridge : {1e-6, 1e-3, 1e-1, 1.0, 10.0}) {
        const double n = solve_complex_lls(A, b, ridge).norm();
        REQUIRE(n <= prev + 1e-12);
        prev = n;
    }
}

TEST_CASE("solve_complex_lls is deterministic") {
    ComplexMatrix A = random_complex(15, 7, 51);
    ComplexVector b = random_complex(15, 1, 52);
    ComplexVector c1 = solve_complex_lls(A, b, 0.0);
    ComplexVector c2 = solve_complex_lls(A, b, 0.0);
    REQUIRE(c1 == c2);
}

TEST_CASE("solve_complex_lls rejects bad input") {
    ComplexMatrix A = ComplexMatrix::Identity(2, 2);
    ComplexVector b(3);
    b.setZero();
    REQUIRE_THROWS_AS(solve_complex_lls(A, b, 0.0), std::invalid_argument);
    ComplexVector b2(2);
    b2 << Complex(std::nan(""), 0), Complex(0, 0);
    REQUIRE_THROWS_AS(solve_complex_lls(A, b2, 0.0), std::invalid_argument);
    ComplexVector b3 = ComplexVector::Zero(2);
    REQUIRE_THROWS_AS(solve_complex_lls(A, b3, -1.0), std::invalid_argument);
}

TEST_CASE("cached solver matches the one-shot path over multiple rhs") {
    ComplexMatrix A = random_complex(10, 4, 61);
    ComplexLlsSolver solver(A, 0.0);
    for (int i = 0; i < 3; ++i) {
        ComplexVector b = random_complex(10, 1, 70 + static_cast<std::uint64_t>(i));
        REQUIRE((solver.solve(b) - solve_complex_lls(A, b, 0.0)).norm() < 1e-14);
    }
}

TEST_CASE("rk4_step with zero rhs is the identity") {
    Eigen::VectorXd s(3);
    s << 1.0, -2.0, 0.5;
    auto zero = [](const Eigen::VectorXd& u) { return Eigen::VectorXd(Eigen::VectorXd::Zero(u.size())); };
    REQUIRE(rk4_step(zero, s, 0.1) == s);
}

TEST_CASE("rk4_step matches the exponential to fifth order") {
    Eigen::VectorXd s(1);
    s << 1.0;
    auto rhs = [](const Eigen::VectorXd& u) { return u; };
    Eigen::VectorXd out = rk4_step(rhs, s, 0.1);
    REQUIRE(std::abs(out[0] - std::exp(0.1)) < 1e-7);
}

TEST_CASE("rk4_step preserves the rotation norm") {
    Eigen::VectorXd s(2);
    s << 1.0, 0.0;
    auto rhs = [](const Eigen::VectorXd& u) {
        Eigen::VectorXd d(2);
        d << u[1], -u[0];
        return d;
    };
    Eigen::VectorXd out = rk4_step(rhs, s, 0.01);
    REQUIRE(out.norm() == Approx(1.0).margin(1e-10));
}

TEST_CASE("integrate: zero steps, exponential accuracy, convergence order") {
    Eigen::VectorXd s(1);
    s << 1.0;
    auto rhs = [](const Eigen::VectorXd& u) { return u; };

    REQUIRE(integrate(rhs, s, 0.01, 0) == s);

    Eigen::VectorXd e = integrate(rhs, s, 0.01, 100);
    REQUIRE(std::abs(e[0] - std::exp(1.0)) / std::exp(1.0) < 1e-8);

    // halving dt at fixed final time shrinks the error ~16x
    const double err1 = std::abs(integrate(rhs, s, 0.1, 10)[0] - std::exp(1.0));
    const double err2 = std::abs(integrate(rhs, s, 0.05, 20)[0] - std::exp(1.0));
    REQUIRE(err1 / err2 > 12.0);
    REQUIRE(err1 / err2 < 20.0);
}

TEST_CASE("rk4 measured convergence order is at least 3.8") {
    Eigen::VectorXd s(1);
    s << 1.0;
    auto rhs = [](const Eigen::VectorXd& u) { return u; };
    std::vector<double> dts = {0.1, 0.05, 0.025, 0.0125};
    std::vector<double> log_dt, log_err;
    for (double dt : dts) {
        const int n = static_cast<int>(std::lround(1.0 / dt));
        log_dt.push_back(std::log(dt));
        log_err.push_back(std::log(std::abs(integrate(rhs, s, dt, n)[0] - std::exp(1.0))));
    }
    // least-squares slope of log-error vs log-dt
    double mx = 0, my = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(dts.size());
    for (std::size_t i = 0; i < dts.size(); ++i) {
        mx += log_dt[i];
        my += log_err[i];
    }
    mx /= n;
    my /= n;
    for (std::size_t i = 0; i < dts.size(); ++i) {
        sxx += (log_dt[i] - mx) * (log_dt[i] - mx);
        sxy += (log_dt[i] - mx) * (log_err[i] - my);
    }
    REQUIRE(sxy / sxx >= 3.8);
}

TEST_CASE("rk4_step rejects shape-mismatched rhs") {
    Eigen::VectorXd s(2);
    s << 1.0, 2.0;
    auto bad = [](const Eigen::VectorXd&) { return Eigen::VectorXd(Eigen::VectorXd::Zero(3)); };
    REQUIRE_THROWS_AS(rk4_step(bad, s, 0.1), std::invalid_argument);
    auto zero = [](const Eigen::VectorXd& u) { return Eigen::VectorXd(Eigen::VectorXd::Zero(u.size())); };
    REQUIRE_THROWS_AS(rk4_step(zero, s, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(integrate(zero, s, 0.1, -1), std::invalid_argument);
}
