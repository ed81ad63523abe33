#include "oracles.hpp"

#include "transrev/core_ops.hpp"
#include "transrev/errors.hpp"

#include <doctest.h>

#include <random>

using namespace transrev;

TEST_CASE("grid field basics") {
    GridField f(8);
    CHECK(f.size() == 8);
    CHECK(f.spacing() * 8.0 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(GridField({1.0, NAN}), NumericalError);
    CHECK_THROWS_AS(GridField::unit(4, 4), DimensionError);
}

TEST_CASE("real shift splits into integral and fractional parts") {
    for (double v : {0.0, 1.25, -1.5, 2.0, -0.25, 7.999999999999999}) {
        RealShift s(v);
        CHECK(s.fractional_part() >= 0.0);
        CHECK(s.fractional_part() < 1.0);
        CHECK(static_cast<double>(s.integral_part()) + s.fractional_part() == doctest::Approx(v).epsilon(1e-14));
    }
    CHECK(RealShift(-1.5).integral_part() == -2);
    CHECK(RealShift(-1.5).fractional_part() == 0.5);
    CHECK_THROWS_AS(RealShift{double(INFINITY)}, NumericalError);
}

TEST_CASE("wrap_shift picks the representative in (-N/2, N/2]") {
    CHECK(wrap_shift(0, 8) == 0);
    CHECK(wrap_shift(4, 8) == 4);
    CHECK(wrap_shift(5, 8) == -3);
    CHECK(wrap_shift(-4, 8) == 4);
    CHECK(wrap_shift(17, 8) == 1);
    CHECK(wrap_shift(2, 5) == 2);
    CHECK(wrap_shift(3, 5) == -2);
}

TEST_CASE("shift_integer examples") {
    CHECK(shift_integer(GridField::unit(4, 0), 1) == GridField::unit(4, 1));
    GridField f{1, 2, 3, 4};
    CHECK(shift_integer(f, 0) == f);
    CHECK(shift_integer(f, -1) == GridField{2, 3, 4, 1});
    CHECK(shift_integer(f, 9) == shift_integer(f, 1));
}

TEST_CASE("shift_integer matches the dense permutation") {
    std::mt19937_64 rng(1);
    for (long s = -12; s <= 12; ++s) {
        const Vector v = oracle::random_vector(rng, 9);
        const Vector expect = oracle::shift_matrix(9, s) * v;
        CHECK(shift_integer(GridField(v), s).values() == expect);
    }
}

TEST_CASE("shift_fractional examples") {
    std::mt19937_64 rng(2);
    const GridField f(oracle::random_vector(rng, 7));
    CHECK(shift_fractional(f, 0.0) == f);
    CHECK(shift_fractional(f, 1.0) == shift_integer(f, 1));
    const GridField g = shift_fractional(GridField::unit(4, 0), 0.25);
    CHECK(g[0] == 0.75);
    CHECK(g[1] == 0.25);
    CHECK(g[2] == 0.0);
    CHECK(g[3] == 0.0);
    CHECK_THROWS_AS(shift_fractional(f, 1.5), CflError);
    CHECK_THROWS_AS(shift_fractional(f, -0.1), CflError);
}

TEST_CASE("shift_real examples") {
    std::mt19937_64 rng(3);
    const GridField f(oracle::random_vector(rng, 10));
    CHECK(shift_real(f, 2.0) == shift_integer(f, 2));

    const GridField g = shift_real(GridField::unit(4, 0), 1.25);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == 0.75);
    CHECK(g[2] == 0.25);
    CHECK(g[3] == 0.0);

    // K~(-1.5) is the transpose of K~(1.5)
    const Vector e3 = GridField::unit(6, 2).values();
    const Vector expect = oracle::real_shift_matrix(6, 1.5).transpose() * e3;
    CHECK((shift_real(GridField(e3), -1.5).values() - expect).norm() < 1e-15);
    CHECK(shift_real_adjoint(GridField(e3), RealShift(1.5)).values() == shift_real(GridField(e3), -1.5).values());
}

TEST_CASE("shift_real matches dense oracle and transpose identity") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> w(-20.0, 20.0);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 5 + static_cast<std::size_t>(t % 11);
        const double v = w(rng);
        const Vector x = oracle::random_vector(rng, n);
        const Matrix k = oracle::real_shift_matrix(n, v);
        CHECK((shift_real(GridField(x), v).values() - k * x).norm() < 1e-13);
        CHECK((shift_real(GridField(x), -v).values() - k.transpose() * x).norm() < 1e-13);
    }
}

TEST_CASE("shift_real is N-periodic in the shift value") {
    std::mt19937_64 rng(5);
    const GridField f(oracle::random_vector(rng, 12));
    for (double v : {0.3, 2.0, -4.75, 5.5}) {
        CHECK((shift_real(f, v + 12.0).values() - shift_real(f, v).values()).cwiseAbs().maxCoeff() <= 1e-13);
    }
}

TEST_CASE("discrete laplacian") {
    CHECK(discrete_laplacian(GridField{3, 3, 3, 3}).values().isZero());
    const GridField l = discrete_laplacian(GridField::unit(4, 0));
    CHECK(l == GridField{-32, 16, 0, 16});

    const std::size_t n = 100;
    Vector s(n);
    for (std::size_t i = 0; i < n; ++i) s[static_cast<long>(i)] = std::sin(2.0 * M_PI * (static_cast<double>(i) + 0.5) / n);
    const Vector ls = discrete_laplacian(GridField(s)).values();
    const Vector expect = -(2.0 * M_PI) * (2.0 * M_PI) * s;
    CHECK((ls - expect).norm() / expect.norm() <= 1e-2);
}

TEST_CASE("fractional shifts commute, also through the transpose") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const GridField f(oracle::random_vector(rng, 16));
        const double a = u(rng), b = u(rng);
        const Vector ab = shift_fractional(shift_fractional(f, a), b).values();
        const Vector ba = shift_fractional(shift_fractional(f, b), a).values();
        CHECK((ab - ba).cwiseAbs().maxCoeff() <= 1e-13);
        // K(a)^T K(b) == K(b) K(a)^T
        const Vector atb = shift_real(shift_fractional(f, b), -a).values();
        const Vector bat = shift_fractional(shift_real(f, -a), b).values();
        CHECK((atb - bat).cwiseAbs().maxCoeff() <= 1e-13);
    }
}

TEST_CASE("semigroup defect is a shifted second difference") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    const std::size_t n = 20;
    for (int t = 0; t < 50; ++t) {
        const Vector x = oracle::random_vector(rng, n);
        const GridField f(x);
        const double a = u(rng), b = u(rng);
        const Vector defect = shift_fractional(shift_fractional(f, a), b).values() - shift_fractional(f, a + b).values();
        // K(a)K(b) - K(a+b) = ab (K - I)^2 = ab K L / N^2
        const Vector expect = a * b * (oracle::shift_matrix(n, 1) * oracle::laplacian_matrix(n) * x) / double(n * n);
        CHECK((defect - expect).cwiseAbs().maxCoeff() <= 1e-13);
    }
}

TEST_CASE("mass is conserved by every shift") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> w(-50.0, 50.0);
    for (int t = 0; t < 200; ++t) {
        const GridField f(oracle::random_vector(rng, 33));
        const double v = w(rng);
        CHECK(std::abs(shift_real(f, v).sum() - f.sum()) <= 1e-12 * 33 * f.max_abs());
    }
}

TEST_CASE("K(nu)^T K(nu) - I equals nu(1-nu)/N^2 times the laplacian") {
    for (std::size_t n : {8u, 16u, 31u}) {
        for (int k = 1; k <= 9; ++k) {
            const double nu = 0.1 * k;
            const Matrix kn = oracle::fractional_matrix(n, nu);
            const Matrix lhs = kn.transpose() * kn - Matrix::Identity(long(n), long(n));
            const Matrix rhs = nu * (1.0 - nu) / double(n * n) * oracle::laplacian_matrix(n);
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-13);
        }
    }
}

TEST_CASE("transport_columns examples") {
    std::mt19937_64 rng(9);
    const SnapshotMatrix a(oracle::random_matrix(rng, 8, 5));
    const std::vector<long> zero(5, 0);
    CHECK(transport_columns(a, zero) == a);

    const std::size_t n = 10;
    const SnapshotMatrix id(Matrix::Identity(n, n) * double(n));
    std::vector<long> back(n);
    for (std::size_t j = 0; j < n; ++j) back[j] = -static_cast<long>(j);
    const SnapshotMatrix aligned = transport_columns(id, back);
    for (std::size_t j = 0; j < n; ++j) CHECK(aligned.column(j) == GridField::unit(n, 0, double(n)));

    std::uniform_int_distribution<long> s(-20, 20);
    std::vector<long> nu(5), minus(5);
    for (std::size_t j = 0; j < 5; ++j) {
        nu[j] = s(rng);
        minus[j] = -nu[j];
    }
    CHECK(transport_columns(transport_columns(a, minus), nu) == a);
}

TEST_CASE("transport_columns checks shapes") {
    const SnapshotMatrix a(Matrix::Ones(4, 3));
    const std::vector<long> two(2, 0);
    CHECK_THROWS_AS(transport_columns(a, two), DimensionError);
    const std::vector<long> three(3, 0);
    const std::vector<double> h(2, 1.0);
    CHECK_THROWS_AS(transport_columns(a, three, std::span<const double>(h)), DimensionError);
    CutoffMatrix q(4, 2);
    CHECK_THROWS_AS(transport_columns(a, three, std::nullopt, &q), DimensionError);
}

TEST_CASE("transport_columns applies scaling and cut-off") {
    const SnapshotMatrix a(Matrix::Ones(3, 2));
    const std::vector<long> s{0, 1};
    const std::vector<double> h{2.0, -1.0};
    CutoffMatrix q(3, 2, true);
    q.set(1, 0, false);
    const SnapshotMatrix out = transport_columns(a, s, std::span<const double>(h), &q);
    CHECK(out.data()(0, 0) == 2.0);
    CHECK(out.data()(1, 0) == 0.0);
    CHECK(out.data()(2, 1) == -1.0);
}

TEST_CASE("snapshot matrix validation") {
    CHECK_THROWS_AS(SnapshotMatrix(Matrix::Ones(2, 2), {0.0}), DimensionError);
    CHECK_THROWS_AS(SnapshotMatrix(Matrix::Ones(2, 2), {1.0, 1.0}), InvalidArgument);
    Matrix bad = Matrix::Ones(2, 2);
    bad(0, 1) = NAN;
    CHECK_THROWS_AS(SnapshotMatrix{bad}, NumericalError);
}
