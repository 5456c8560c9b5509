#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "grind/fourier.hpp"
#include "grind/grid.hpp"

using namespace grind;
using Catch::Approx;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::MatrixXd random_points(Eigen::Index n, int dims, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Eigen::MatrixXd pts(n, dims);
    for (Eigen::Index i = 0; i < n; ++i)
        for (int d = 0; d < dims; ++d) pts(i, d) = uni(rng);
    return pts;
}

// Independent term-by-term series summation, kept free of the library's
// design-matrix path.
Eigen::MatrixXd naive_evaluate(const FourierCoefficients& fc, const Eigen::MatrixXd& targets) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(targets.rows(), fc.coeffs.cols());
    for (Eigen::Index t = 0; t < targets.rows(); ++t)
        for (Eigen::Index c = 0; c < fc.coeffs.cols(); ++c) {
            Complex acc(0.0, 0.0);
            for (Eigen::Index l = 0; l < fc.freq.size(); ++l) {
                double phase = 0.0;
                for (int d = 0; d < fc.freq.dims(); ++d) phase += fc.freq.indices(l, d) * targets(t, d);
                acc += fc.coeffs(l, c) * std::exp(Complex(0.0, kTwoPi * phase));
            }
            out(t, c) = acc.real();
        }
    return out;
}

}  // namespace

TEST_CASE("frequency_set odd and even 1-D cases") {
    FrequencySet odd = frequency_set({3});
    REQUIRE(odd.size() == 3);
    REQUIRE(odd.indices(0, 0) == -1);
    REQUIRE(odd.indices(1, 0) == 0);
    REQUIRE(odd.indices(2, 0) == 1);

    FrequencySet even = frequency_set({4});
    REQUIRE(even.size() == 4);
    REQUIRE(even.indices(0, 0) == -2);
    REQUIRE(even.indices(3, 0) == 1);
}

TEST_CASE("frequency_set 2-D cartesian product in lexicographic order") {
    FrequencySet fs = frequency_set({2, 2});
    REQUIRE(fs.size() == 4);
    const int expected[4][2] = {{-1, -1}, {-1, 0}, {0, -1}, {0, 0}};
    for (int r = 0; r < 4; ++r) {
        REQUIRE(fs.indices(r, 0) == expected[r][0]);
        REQUIRE(fs.indices(r, 1) == expected[r][1]);
    }
}

TEST_CASE("frequency_set sizes multiply across dimensions") {
    for (int n1 = 1; n1 <= 6; ++n1) {
        REQUIRE(frequency_set({n1}).size() == n1);
        for (int n2 = 1; n2 <= 6; ++n2) REQUIRE(frequency_set({n1, n2}).size() == n1 * n2);
    }
    REQUIRE_THROWS_AS(frequency_set({0}), std::invalid_argument);
}

TEST_CASE("design_matrix entries match the basis exponentials") {
    FrequencySet k0 = frequency_set({1});
    Eigen::MatrixXd origin(1, 1);
    origin << 0.0;
    ComplexMatrix a = design_matrix(origin, k0);
    REQUIRE(a.rows() == 1);
    REQUIRE(a.cols() == 1);
    REQUIRE(std::abs(a(0, 0) - Complex(1, 0)) < 1e-15);

    FrequencySet k = frequency_set({3});  // {-1, 0, 1}
    Eigen::MatrixXd half(1, 1);
    half << 0.5;
    REQUIRE(std::abs(design_matrix(half, k)(0, 2) - Complex(-1, 0)) < 1e-15);
    Eigen::MatrixXd quarter(1, 1);
    quarter << 0.25;
    REQUIRE(std::abs(design_matrix(quarter, k)(0, 2) - Complex(0, 1)) < 1e-15);
}

TEST_CASE("fit_coefficients: constant field lands on the k=0 mode") {
    ScatteredField field;
    field.points.resize(3, 1);
    field.points << 0.1, 0.3, 0.7;
    field.values = Eigen::MatrixXd::Ones(3, 1);
    FourierCoefficients fc = fit_coefficients(field, frequency_set({3}), 0.0);
    REQUIRE(std::abs(fc.coeffs(1, 0) - Complex(1, 0)) < 1e-10);
    REQUIRE(std::abs(fc.coeffs(0, 0)) < 1e-10);
    REQUIRE(std::abs(fc.coeffs(2, 0)) < 1e-10);
}

TEST_CASE("fit_coefficients: cosine splits into conjugate modes") {
    ScatteredField field;
    field.points.resize(8, 1);
    field.values.resize(8, 1);
    for (int i = 0; i < 8; ++i) {
        field.points(i, 0) = i / 8.0;
        field.values(i, 0) = std::cos(kTwoPi * field.points(i, 0));
    }
    FourierCoefficients fc = fit_coefficients(field, frequency_set({3}), 0.0);
    REQUIRE(std::abs(fc.coeffs(0, 0) - Complex(0.5, 0)) < 1e-10);
    REQUIRE(std::abs(fc.coeffs(1, 0)) < 1e-10);
    REQUIRE(std::abs(fc.coeffs(2, 0) - Complex(0.5, 0)) < 1e-10);
}

TEST_CASE("underdetermined fit with explicit ridge stays small-residual and finite") {
    ScatteredField field;
    field.points.resize(2, 1);
    field.points << 0.2, 0.6;
    field.values.resize(2, 1);
    field.values << 1.0, -1.0;
    FourierCoefficients fc = fit_coefficients(field, frequency_set({3}), 1e-6);
    REQUIRE(fc.coeffs.allFinite());
    Eigen::MatrixXd at_samples = evaluate(fc, field.points);
    REQUIRE((at_samples - field.values).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("evaluate: constant coefficient and cosine pair") {
    FourierCoefficients fc;
    fc.freq = frequency_set({3});
    fc.coeffs = ComplexMatrix::Zero(3, 1);
    fc.coeffs(1, 0) = Complex(2.0, 0.0);
    Eigen::MatrixXd targets = random_points(5, 1, 3);
    Eigen::MatrixXd vals = evaluate(fc, targets);
    REQUIRE((vals.array() - 2.0).abs().maxCoeff() < 1e-12);

    fc.coeffs.setZero();
    fc.coeffs(0, 0) = Complex(0.5, 0.0);
    fc.coeffs(2, 0) = Complex(0.5, 0.0);
    Eigen::MatrixXd probe(2, 1);
    probe << 0.0, 0.25;
    Eigen::MatrixXd v = evaluate(fc, probe);
    REQUIRE(v(0, 0) == Approx(1.0).margin(1e-12));
    REQUIRE(v(1, 0) == Approx(0.0).margin(1e-12));
}

TEST_CASE("evaluate matches the naive summation oracle") {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> normal(0.0, 1.0);
    FourierCoefficients fc;
    fc.freq = frequency_set({3, 4});
    fc.coeffs.resize(fc.freq.size(), 2);
    for (Eigen::Index l = 0; l < fc.coeffs.rows(); ++l)
        for (Eigen::Index c = 0; c < 2; ++c) fc.coeffs(l, c) = Complex(normal(rng), normal(rng));
    Eigen::MatrixXd targets = random_points(10, 2, 78);
    REQUIRE((evaluate(fc, targets) - naive_evaluate(fc, targets)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fi_layer exactly recovers band-limited data") {
    // generate from conjugate-symmetric coefficients so the field is real
    FrequencySet fs = frequency_set({5, 5});
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix coeffs = ComplexMatrix::Zero(fs.size(), 1);
    for (Eigen::Index l = 0; l < fs.size(); ++l) {
        if (coeffs(l, 0) != Complex(0, 0)) continue;
        // find the conjugate partner -k inside the set
        Eigen::Index partner = -1;
        for (Eigen::Index m = 0; m < fs.size(); ++m)
            if (fs.indices(m, 0) == -fs.indices(l, 0) && fs.indices(m, 1) == -fs.indices(l, 1)) partner = m;
        const Complex z(normal(rng), normal(rng));
        if (partner == l) {
            coeffs(l, 0) = Complex(z.real(), 0.0);
        } else if (partner >= 0) {
            coeffs(l, 0) = z;
            coeffs(partner, 0) = std::conj(z);
        }
    }
    FourierCoefficients truth{fs, coeffs};

    ScatteredField field;
    field.points = random_points(120, 2, 6);
    field.values = naive_evaluate(truth, field.points);
    Eigen::MatrixXd targets = random_points(40, 2, 7);
    Eigen::MatrixXd interpolated = fi_layer(field, targets, 5, 0.0);
    REQUIRE((interpolated - naive_evaluate(truth, targets)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("fi_layer is linear in the sample values") {
    ScatteredField u, v;
    u.points = v.points = random_points(60, 2, 8);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> normal(0.0, 1.0);
    u.values.resize(60, 1);
    v.values.resize(60, 1);
    for (int i = 0; i < 60; ++i) {
        u.values(i, 0) = normal(rng);
        v.values(i, 0) = normal(rng);
    }
    Eigen::MatrixXd targets = random_points(20, 2, 10);
    const double alpha = 1.7, beta = -0.4;
    ScatteredField combo;
    combo.points = u.points;
    combo.values = alpha * u.values + beta * v.values;
    Eigen::MatrixXd lhs = fi_layer(combo, targets, 4, 0.0);
    Eigen::MatrixXd rhs = alpha * fi_layer(u, targets, 4, 0.0) + beta * fi_layer(v, targets, 4, 0.0);
    REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("fit residual is first-order stationary at the solution") {
    ScatteredField field;
    field.points = random_points(50, 1, 13);
    std::mt19937_64 rng(14);
    std::normal_distribution<double> normal(0.0, 1.0);
    field.values.resize(50, 1);
    for (int i = 0; i < 50; ++i) field.values(i, 0) = normal(rng);

    FrequencySet fs = frequency_set({5});
    FourierCoefficients fc = fit_coefficients(field, fs, 0.0);
    ComplexMatrix A = design_matrix(field.points, fs);
    const double base = (A * fc.coeffs.col(0) - field.values.col(0).cast<Complex>()).squaredNorm();
    for (int trial = 0; trial < 20; ++trial) {
        ComplexVector dir(fs.size());
        for (Eigen::Index l = 0; l < fs.size(); ++l) dir[l] = Complex(normal(rng), normal(rng));
        const double perturbed =
            (A * (fc.coeffs.col(0) + 1e-4 * dir) - field.values.col(0).cast<Complex>()).squaredNorm();
        REQUIRE(perturbed >= base - 1e-12);
    }
}

TEST_CASE("discarded imaginary part is negligible for conjugate-symmetric inputs") {
    ScatteredField field;
    field.points = random_points(80, 1, 15);
    field.values.resize(80, 1);
    for (int i = 0; i < 80; ++i)
        field.values(i, 0) = 1.0 + std::cos(kTwoPi * field.points(i, 0)) + 0.5 * std::sin(2.0 * kTwoPi * field.points(i, 0));
    FourierCoefficients fc = fit_coefficients(field, frequency_set({7}), 0.0);
    Eigen::MatrixXd targets = random_points(30, 1, 16);
    ComplexMatrix full = design_matrix(targets, fc.freq) * fc.coeffs;
    REQUIRE(full.imag().cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("grid_targets conventions") {
    Eigen::MatrixXd g2 = grid_targets({2});
    REQUIRE(g2.rows() == 2);
    REQUIRE(g2(0, 0) == 0.0);
    REQUIRE(g2(1, 0) == 0.5);

    Eigen::MatrixXd g4 = grid_targets({4});
    REQUIRE(g4(3, 0) == 0.75);

    Eigen::MatrixXd g = grid_targets({64, 64});
    REQUIRE(g.rows() == 4096);
    REQUIRE(g(0, 0) == 0.0);
    REQUIRE(g(4095, 0) == Approx(63.0 / 64.0));
    REQUIRE_THROWS_AS(grid_targets({0}), std::invalid_argument);
}

TEST_CASE("mirror fold map values") {
    REQUIRE(mirror_fold(0.0) == Approx(1.0));
    REQUIRE(mirror_fold(0.5) == Approx(0.0));
    REQUIRE(mirror_fold(0.75) == Approx(0.5));
    REQUIRE(mirror_fold(0.25) == Approx(mirror_fold(0.75)));
}

TEST_CASE("mirror replication doubles 1-D samples symmetrically") {
    Eigen::MatrixXd pts(3, 1);
    pts << 0.1, 0.5, 0.9;
    Eigen::MatrixXd mirrored = detail::mirror_points(detail::embed_subdomain(pts));
    REQUIRE(mirrored.rows() == 6);
    // the set must be closed under x -> 1 - x
    for (Eigen::Index i = 0; i < 6; ++i) {
        bool found = false;
        for (Eigen::Index j = 0; j < 6; ++j)
            if (std::abs(mirrored(j, 0) - (1.0 - mirrored(i, 0))) < 1e-14) found = true;
        REQUIRE(found);
    }
}

TEST_CASE("mirror surrogate fit is symmetric per dimension") {
    ScatteredField field;
    field.points = random_points(100, 1, 17);
    field.values.resize(100, 1);
    for (int i = 0; i < 100; ++i) field.values(i, 0) = field.points(i, 0);  // f(x) = x, non-periodic

    Eigen::MatrixXd mirrored = detail::mirror_points(detail::embed_subdomain(field.points));
    Eigen::MatrixXd doubled(200, 1);
    doubled << field.values, field.values;
    ScatteredField surrogate;
    surrogate.points = mirrored;
    surrogate.values = doubled;
    FourierCoefficients fc = fit_coefficients(surrogate, frequency_set({9}), 0.0);

    Eigen::MatrixXd probes = random_points(25, 1, 18);
    Eigen::MatrixXd flipped = 1.0 - probes.array();
    REQUIRE((evaluate(fc, probes) - evaluate(fc, flipped)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("mirror_fi_layer beats the plain periodic layer on f(x) = x") {
    ScatteredField field;
    field.points = random_points(200, 1, 19);
    field.values.resize(200, 1);
    for (int i = 0; i < 200; ++i) field.values(i, 0) = field.points(i, 0);

    Eigen::MatrixXd targets = grid_targets({64});
    Eigen::MatrixXd truth = targets;

    const double mse_mirror = (mirror_fi_layer(field, targets, 9, 0.0) - truth).squaredNorm() / 64.0;
    const double mse_plain = (fi_layer(field, targets, 9, 0.0) - truth).squaredNorm() / 64.0;
    INFO("mirror MSE " << mse_mirror << " vs plain MSE " << mse_plain);
    REQUIRE(mse_mirror < mse_plain);
}

TEST_CASE("fi_layer preserves constants") {
    ScatteredField field;
    field.points = random_points(40, 2, 20);
    field.values = Eigen::MatrixXd::Constant(40, 1, 3.25);
    Eigen::MatrixXd out = fi_layer(field, random_points(10, 2, 21), 5, 0.0);
    REQUIRE((out.array() - 3.25).abs().maxCoeff() < 1e-9);
}

TEST_CASE("dimension mismatches are rejected") {
    ScatteredField field;
    field.points = random_points(10, 2, 22);
    field.values = Eigen::MatrixXd::Zero(10, 1);
    REQUIRE_THROWS_AS(fit_coefficients(field, frequency_set({3}), 0.0), std::invalid_argument);
    ScatteredField bad;
    bad.points = Eigen::MatrixXd::Constant(4, 1, 1.5);
    bad.values = Eigen::MatrixXd::Zero(4, 1);
    REQUIRE_THROWS_AS(fit_coefficients(bad, frequency_set({3}), 0.0), std::invalid_argument);
}
