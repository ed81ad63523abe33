#include "oracles.hpp"

#include "transrev/errors.hpp"
#include "transrev/reversal_real.hpp"

#include <doctest.h>

#include <random>

using namespace transrev;

namespace {

// |b - K(w)^T a|^2 from the dense matrix
double dense_objective(const Vector& a, const Vector& b, double w) {
    const std::size_t n = std::size_t(a.size());
    const Matrix kt = ((1.0 - w) * Matrix::Identity(a.size(), a.size()) + w * oracle::shift_matrix(n, 1)).transpose();
    return (b - kt * a).squaredNorm();
}

double scan_argmin(const Vector& a, const Vector& b, double lo, double hi, double step) {
    double best = lo, value = dense_objective(a, b, lo);
    for (double w = lo; w <= hi; w += step) {
        const double v = dense_objective(a, b, w);
        if (v < value) {
            value = v;
            best = w;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("is_constant") {
    CHECK(is_constant(GridField{2, 2, 2}));
    CHECK(is_constant(GridField(5)));
    CHECK_FALSE(is_constant(GridField{2, 2, 2.1}));
}

TEST_CASE("optimal fraction matches the dense quadratic") {
    const Vector a = GridField{1, 1, 0, 0}.values();
    const Vector b = GridField{0, 1, 1, 0}.values();
    const double nu = optimal_fraction(GridField(a), GridField(b));
    CHECK(std::abs(nu - scan_argmin(a, b, -2.0, 2.0, 1e-5)) <= 1e-4);

    std::mt19937_64 rng(21);
    for (int t = 0; t < 20; ++t) {
        const Vector x = oracle::random_vector(rng, 10);
        const Vector y = oracle::random_vector(rng, 10);
        const double w = optimal_fraction(GridField(x), GridField(y));
        // stationarity: the quadratic's derivative vanishes at w
        const double eps = 1e-4;
        const double slope = (dense_objective(x, y, w + eps) - dense_objective(x, y, w - eps)) / (2 * eps);
        CHECK(std::abs(slope) < 1e-8);
    }

    // b = a: the best fraction on a symmetric pulse is the identity
    const Vector g = oracle::gaussian(32, 0.5, 0.1);
    CHECK(std::abs(optimal_fraction(GridField(g), GridField(g))) < 1e-12);
    CHECK_THROWS_AS(optimal_fraction(GridField{3, 3, 3}, GridField{1, 2, 3}), ConstantVectorError);
}

TEST_CASE("recursion steps agree with the direct formula") {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 20; ++t) {
        const GridField a(oracle::random_vector(rng, 16));
        const GridField b(oracle::random_vector(rng, 16));
        double plus = optimal_fraction(a, b);
        double minus = plus;
        for (long s = 0; s < 5; ++s) {
            plus = recursion_step(plus, a, b, s, Direction::Plus);
            minus = recursion_step(minus, a, b, s, Direction::Minus);
        }
        CHECK(std::abs(plus - optimal_fraction(shift_integer(a, -5), b)) <= 1e-11);
        CHECK(std::abs(minus - optimal_fraction(shift_integer(a, 5), b)) <= 1e-11);
    }
}

TEST_CASE("recursion with constant b does not move") {
    const GridField a{1, 4, 2, 0, 3, 1};
    const GridField b{2, 2, 2, 2, 2, 2};
    const double start = optimal_fraction(a, b);
    double nu = start;
    for (long s = 0; s < 6; ++s) {
        nu = recursion_step(nu, a, b, s, Direction::Plus);
        CHECK(nu == doctest::Approx(start).epsilon(1e-14));
    }
}

TEST_CASE("period detection") {
    CHECK(detect_period(GridField::unit(8, 0)) == 8);
    Vector two = Vector::Zero(12);
    two[1] = 1.0;
    two[2] = 0.5;
    two[7] = 1.0;
    two[8] = 0.5;
    CHECK(detect_period(GridField(two)) == 6);
    Vector c(16);
    for (int i = 0; i < 16; ++i) c[i] = std::cos(2 * M_PI * 4 * i / 16.0);
    CHECK(detect_period(GridField(c)) == 4);
    CHECK_THROWS_AS(detect_period(GridField{1, 1, 1}), ConstantVectorError);

    std::mt19937_64 rng(23);
    for (int t = 0; t < 30; ++t) {
        const Vector x = oracle::random_vector(rng, 24);
        CHECK(24 % detect_period(GridField(x)) == 0);
    }
}

TEST_CASE("best real shift recovers integer shifts exactly") {
    const Vector a = oracle::gaussian(40, 0.3, 0.05);
    const GridField b = shift_real(GridField(a), 3.0);
    const RealShiftFit fit = best_real_shift(GridField(a), b);
    // the shift maps b back onto a: -3 modulo N
    CHECK(fit.shift == 37.0);
    CHECK(fit.objective == 0.0);
    CHECK(fit.candidates.candidates.size() == fit.candidates.objective_values.size());

    CHECK(best_real_shift(GridField(a), GridField(a)).shift == 0.0);
}

TEST_CASE("best real shift near a fractional shift") {
    const std::size_t n = 64;
    const Vector a = oracle::gaussian(n, 0.3, 0.05);
    const GridField b = shift_real(GridField(a), 2.3);
    const RealShiftFit fit = best_real_shift(GridField(a), b);
    CHECK(std::abs(fit.shift - (double(n) - 2.3)) <= 0.05);
    // fine scan oracle of the same objective
    double best = 0.0, value = 1e300;
    for (double w = 0.0; w < double(n); w += 1e-3) {
        const double v = real_shift_objective(GridField(a), b, w);
        if (v < value) {
            value = v;
            best = w;
        }
    }
    CHECK(fit.objective <= value + 1e-12);
    CHECK(std::abs(fit.shift - best) <= 2e-3);
}

TEST_CASE("best real shift is the minimum over its candidates") {
    const std::size_t n = 50;
    const Vector a = oracle::gaussian(n, 0.2, 0.04);
    const Vector b = -0.8 * (oracle::shift_matrix(n, 23) * a);
    const RealShiftFit fit = best_real_shift(GridField(a), GridField(b));
    for (double v : fit.candidates.objective_values) CHECK(fit.objective <= v);
    double value = 1e300;
    for (double w = 0.0; w < double(n); w += 1e-3) value = std::min(value, real_shift_objective(GridField(a), GridField(b), w));
    CHECK(fit.objective <= value + 1e-9);
}

TEST_CASE("objective symmetry up to the diffusion bound") {
    const std::size_t n = 100;
    const GridField a(oracle::gaussian(n, 0.3, 0.06));
    const GridField b(oracle::gaussian(n, 0.45, 0.06));
    for (double w : {0.25, 0.5, 1.5, 7.75, 15.5}) {
        const double lhs = (a.values() - shift_real(b, -w).values()).squaredNorm();
        const double rhs = (b.values() - shift_real(a, w).values()).squaredNorm();
        const double nu = w - std::floor(w);
        const double bound = 4 * nu * (1 - nu) * (a.values().squaredNorm() + b.values().squaredNorm());
        CHECK(std::abs(lhs - rhs) <= bound + 1e-12);
    }
}

TEST_CASE("reverse_real aligns exact translates") {
    const std::size_t n = 30, m = 6;
    const Vector b = oracle::gaussian(n, 0.2, 0.05);
    Matrix data(n, m);
    for (std::size_t j = 0; j < m; ++j) data.col(long(j)) = oracle::shift_matrix(n, long(j)) * b;
    const RealReversal r = reverse_real(SnapshotMatrix(data), GridField(b));
    for (std::size_t j = 0; j < m; ++j) {
        CHECK(r.shifts[j] == double(j));
        CHECK(r.reversed.column(j) == GridField(b));
        CHECK(r.boundaries[j].first == data(0, long(j)));
        CHECK(r.boundaries[j].second == data(long(n) - 1, long(j)));
    }
}

TEST_CASE("reverse_real reports the constant column") {
    Matrix data(4, 3);
    data << 1, 2, 5, 0, 2, 1, 3, 2, 0, 1, 2, 2;
    try {
        reverse_real(SnapshotMatrix(data), GridField{1, 0, 3, 1});
        FAIL("expected an error");
    } catch (const ConstantVectorError& e) {
        CHECK(e.column() == 1);
    }
    CHECK_THROWS_AS(reverse_real(SnapshotMatrix(data), GridField{1, 0, 3}), DimensionError);
}

TEST_CASE("sharpen examples") {
    const GridField g(oracle::gaussian(20, 0.5, 0.1));
    CHECK(sharpen(g, 0.0, 0.0, 0.0) == g);
    CHECK(sharpen(g, 1.0, 0.0, 0.0) == g);
    CHECK_THROWS_AS(sharpen(g, 1.5, 0, 0), CflError);
}

TEST_CASE("sharpen solves the pinned system") {
    const std::size_t n = 12;
    std::mt19937_64 rng(24);
    const Vector rhs = oracle::random_vector(rng, n);
    const double nu = 0.3, left = 0.7, right = -0.2;
    const GridField u = sharpen(GridField(rhs), nu, left, right);
    Matrix sys = Matrix::Identity(n, n) + nu * (1 - nu) / double(n * n) * oracle::laplacian_matrix(n);
    Vector b = rhs;
    sys.row(0).setZero();
    sys(0, 0) = 1;
    b[0] = left;
    sys.row(long(n) - 1).setZero();
    sys(long(n) - 1, long(n) - 1) = 1;
    b[long(n) - 1] = right;
    const Vector expect = sys.fullPivLu().solve(b);
    CHECK((u.values() - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sharpening undoes most of the round-trip smearing") {
    const std::size_t n = 100;
    const GridField a(oracle::gaussian(n, 0.5, 0.05));
    for (double w : {0.5, 1.5, 2.5}) {
        const GridField trip = shift_real(shift_real(a, -w), w);
        const double frac = w - std::floor(w);
        const GridField sharp = sharpen(trip, frac, a[0], a[n - 1]);
        const double plain = (trip.values() - a.values()).norm();
        const double fixed = (sharp.values() - a.values()).norm();
        CHECK(fixed <= 0.2 * plain);
    }
}

TEST_CASE("sharpened reconstruction") {
    const std::size_t n = 40, m = 4;
    std::mt19937_64 rng(25);
    const SnapshotMatrix rev(oracle::random_matrix(rng, n, m));
    const std::vector<std::pair<double, double>> ends(m, {0.0, 0.0});
    const std::vector<double> integral{0, 1, 5, 39};
    CHECK(sharpened_reconstruct(rev, integral, ends) == forward_transport(rev, integral));

    const std::vector<double> one{1.5};
    const SnapshotMatrix col(Matrix(rev.data().col(0)));
    const std::vector<std::pair<double, double>> e1{{0.1, 0.2}};
    const GridField expect = sharpen(shift_real(col.column(0), 1.5), 0.5, 0.1, 0.2);
    CHECK(sharpened_reconstruct(col, one, e1).column(0) == expect);
    CHECK_THROWS_AS(sharpened_reconstruct(rev, one, e1), DimensionError);
}
