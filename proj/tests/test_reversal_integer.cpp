#include "oracles.hpp"

#include "transrev/errors.hpp"
#include "transrev/experiment.hpp"
#include "transrev/reversal_integer.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <random>

using namespace transrev;

namespace {

// Straightforward reimplementation of the shift scan, used as the oracle.
struct Brute {
    long shift = 0;
    double value = std::numeric_limits<double>::infinity();
};

Brute brute_scan(const Vector& a, const Vector& b, double lambda, std::optional<long> prev) {
    const long n = a.size();
    Brute best;
    // candidates in order 0, 1, -1, 2, -2, ...
    std::vector<long> order{0};
    for (long d = 1; static_cast<long>(order.size()) < n; ++d) {
        order.push_back(d);
        if (2 * d < n) order.push_back(-d);
    }
    for (long w : order) {
        const Vector kb = oracle::shift_matrix(static_cast<std::size_t>(n), w) * b;
        const double h = kb.squaredNorm() > 0 ? kb.dot(a) / kb.squaredNorm() : 0.0;
        double j = 0.0;
        for (long i = 0; i < n; ++i) {
            const double p = h * kb[i];
            double d = a[i] - p;
            if (std::abs(d) <= 1e-13 * std::abs(a[i])) d = 0.0;
            const bool keep = (d == 0 || a[i] == 0 ? true : (d > 0) == (a[i] > 0)) && std::abs(d) <= std::abs(a[i]);
            const double r = keep ? d : a[i];
            j += r * r;
        }
        if (prev) {
            long dist = oracle::pmod(w - *prev, n);
            if (2 * dist > n) dist -= n;
            j += lambda * double(dist * dist);
        }
        if (j < best.value) {
            best.value = j;
            best.shift = w;
        }
    }
    return best;
}

Vector pulse(std::size_t n, std::size_t at) {
    Vector b = Vector::Zero(long(n));
    b[long(at)] = 1.0;
    b[long(at + 1)] = 3.0;
    b[long(at + 2)] = 2.0;
    return b;
}

}  // namespace

TEST_CASE("project examples") {
    const GridField b{1.0, 2.0, -1.0};
    const Projection same = project(b, b);
    CHECK(same.scaling == doctest::Approx(1.0));
    CHECK((same.projected.values() - b.values()).norm() < 1e-15);

    const Projection zero = project(b, GridField(3));
    CHECK(zero.scaling == 0.0);
    CHECK(zero.projected.values().isZero());

    const Projection p = project(GridField{1.0, 0.0}, GridField{1.0, 1.0});
    CHECK(p.scaling == 0.5);
    CHECK(p.projected == GridField{0.5, 0.5});
    CHECK_THROWS_AS(project(GridField(2), GridField(3)), DimensionError);
}

TEST_CASE("cutoff predicate examples") {
    const GridField a{1.0, -2.0, 0.0, 3.0};
    CHECK(cutoff(a, a) == std::vector<bool>{true, true, true, true});
    CHECK(cutoff(GridField{1.0}, GridField{2.0}) == std::vector<bool>{false});
    CHECK(cutoff(GridField{0.0}, GridField{1.0}) == std::vector<bool>{false});
    CHECK(cutoff(GridField{0.0}, GridField{0.0}) == std::vector<bool>{true});
    CHECK(cutoff(GridField{2.0}, GridField{1.0}) == std::vector<bool>{true});
    CHECK(cutoff(GridField{-2.0}, GridField{1.0}) == std::vector<bool>{false});
}

TEST_CASE("find_shift exact match") {
    const std::size_t n = 16;
    const GridField b(pulse(n, 2));
    for (long k : {0L, 3L, -5L, 8L}) {
        const GridField a = shift_integer(b, k);
        const ShiftFit fit = find_shift(a, b);
        CHECK(fit.shift == wrap_shift(k, n));
        CHECK(fit.scaling == doctest::Approx(1.0));
        CHECK(fit.misfit == doctest::Approx(0.0));
        for (std::size_t i = 0; i < n; ++i) {
            if (a[i] != 0.0) CHECK(fit.mask[i]);
        }
    }
}

TEST_CASE("find_shift of a zero column returns shift 0") {
    const ShiftFit fit = find_shift(GridField(12), GridField(pulse(12, 4)));
    CHECK(fit.shift == 0);
    CHECK(fit.scaling == 0.0);
    CHECK(fit.misfit == 0.0);
}

TEST_CASE("find_shift on noisy data agrees with a brute-force scan") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> noise(0.0, 0.01);
    const std::size_t n = 32;
    const Vector b = oracle::gaussian(n, 0.3, 0.06);
    for (int t = 0; t < 20; ++t) {
        Vector a = oracle::shift_matrix(n, 3) * b;
        for (auto& x : a) x += noise(rng) * b.cwiseAbs().maxCoeff();
        const ShiftFit fit = find_shift(GridField(a), GridField(b));
        // the cut-off drops overshooting entries whole, so noise can pull the
        // best shift off by one; only agreement with the scan is required
        CHECK(std::abs(fit.shift - 3) <= 1);
        CHECK(fit.shift == brute_scan(a, b, 0.0, std::nullopt).shift);
    }
}

TEST_CASE("penalized scan agrees with brute force") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> lam(0.0, 0.5);
    std::uniform_int_distribution<long> prev(-10, 10);
    for (int t = 0; t < 40; ++t) {
        const std::size_t n = 21;
        const Vector a = oracle::random_vector(rng, n);
        const Vector b = oracle::random_vector(rng, n);
        ShiftPenalty p;
        p.lambda = lam(rng);
        p.previous = prev(rng);
        const ShiftFit fit = find_shift(GridField(a), GridField(b), p);
        const Brute ref = brute_scan(a, b, p.lambda, p.previous);
        CHECK(fit.shift == ref.shift);
    }
}

TEST_CASE("ties go to the smallest |omega|, positive first") {
    // b is 2-periodic on N=8, so omega = 1 and -1 fit equally well
    const GridField b{1, 0, 1, 0, 1, 0, 1, 0};
    const GridField a{0, 1, 0, 1, 0, 1, 0, 1};
    CHECK(find_shift(a, b).shift == 1);
    CHECK(find_shift(b, b).shift == 0);
}

TEST_CASE("find_shift rejects negative weights") {
    ShiftPenalty p;
    p.lambda = -1.0;
    CHECK_THROWS_AS(find_shift(GridField(4), GridField(4), p), InvalidArgument);
}

TEST_CASE("adaptive lambda") {
    const GridField b(pulse(100, 10));
    CHECK(adaptive_lambda(GridField(100), b) == 0.0);
    const auto j = shift_misfits(b, b);
    const double c = *std::max_element(j.begin(), j.end()) - *std::min_element(j.begin(), j.end());
    CHECK(c > 0.0);
    CHECK(adaptive_lambda(b, b) == doctest::Approx(2.5 / (c * 100.0)));
    CHECK(adaptive_lambda(b, b, 0.25 * c) == doctest::Approx(0.25 / 100.0));

    ExperimentConfig cfg = preset("p3-acoustic-homogeneous");
    const SnapshotMatrix p = generate(cfg).field("p");
    const double lambda = adaptive_lambda(p.column(10), p.column(0));
    CHECK(lambda > 0.0);
    CHECK(std::isfinite(lambda));
}

TEST_CASE("config validation") {
    ReversalConfig cfg;
    cfg.max_iterations = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.pivot_trigger = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.residual_tolerance = -1.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("identity snapshots line up in one iteration") {
    const std::size_t n = 100;
    const SnapshotMatrix a(Matrix::Identity(n, n) * double(n));
    ReversalConfig cfg;
    cfg.max_iterations = 5;
    const ReversalModel m = greedy_reversal(a, cfg);
    REQUIRE(m.iterations() == 1);
    CHECK(m.residual_history.back() == 0.0);
    for (std::size_t j = 0; j < n; ++j) CHECK(m.shifts[0][j] == wrap_shift(long(j), n));
    CHECK(reconstruct(m) == a);
}

TEST_CASE("single column") {
    const SnapshotMatrix a(Matrix(oracle::gaussian(16, 0.5, 0.1)));
    ReversalConfig cfg;
    cfg.residual_tolerance = 1e-12;
    const ReversalModel m = greedy_reversal(a, cfg);
    CHECK(m.iterations() == 1);
    CHECK(m.residual_history.back() <= 1e-12);
    CHECK(m.shifts[0] == std::vector<long>{0});
}

TEST_CASE("empty model reconstructs to zero") {
    ReversalModel m;
    m.n_cells = 4;
    m.n_snaps = 3;
    m.times = {0, 1, 2};
    m.residual_history = {1.0};
    CHECK(reconstruct(m).data().isZero());
}

TEST_CASE("greedy properties on random data") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 10; ++t) {
        const SnapshotMatrix a(oracle::random_matrix(rng, 12, 9));
        ReversalConfig cfg;
        cfg.max_iterations = 8;
        cfg.pivot_trigger = 0.9;
        const ReversalModel m = greedy_reversal(a, cfg);
        m.validate();
        for (std::size_t k = 1; k < m.residual_history.size(); ++k) {
            CHECK(m.residual_history[k] <= m.residual_history[k - 1]);
        }
        // reconstruction + residual == A
        const Matrix r = a.data() - reconstruct(m).data();
        CHECK(std::abs(r.norm() - m.residual_history.back()) <= 1e-10 * a.frobenius_norm());
        // determinism
        CHECK(greedy_reversal(a, cfg) == m);
    }
}

TEST_CASE("residual entries never grow where the cut-off keeps them") {
    std::mt19937_64 rng(14);
    const SnapshotMatrix a(oracle::random_matrix(rng, 10, 6));
    ReversalConfig cfg;
    cfg.max_iterations = 3;
    const ReversalModel m = greedy_reversal(a, cfg);
    Matrix r = a.data();
    for (std::size_t k = 0; k < m.iterations(); ++k) {
        const Matrix next = r - iteration_contribution(m, k);
        for (long j = 0; j < r.cols(); ++j)
            for (long i = 0; i < r.rows(); ++i) {
                if (m.cutoffs[k](std::size_t(i), std::size_t(j))) {
                    CHECK(std::abs(next(i, j)) <= std::abs(r(i, j)) + 1e-15);
                    CHECK(next(i, j) * r(i, j) >= 0.0);
                }
            }
        r = next;
    }
}

TEST_CASE("large penalty freezes the shifts") {
    const std::size_t n = 24, m = 8;
    Matrix data(n, m);
    const Vector b = oracle::gaussian(n, 0.2, 0.05);
    for (std::size_t j = 0; j < m; ++j) data.col(long(j)) = oracle::shift_matrix(n, long(j)) * b;
    const SnapshotMatrix a(data);
    ReversalConfig cfg;
    cfg.max_iterations = 1;
    cfg.adaptive_lambda = false;
    cfg.lambda = 1e6;
    const ReversalModel model = greedy_reversal(a, cfg);
    for (std::size_t j = 1; j < m; ++j) CHECK(model.shifts[0][j] == model.shifts[0][j - 1]);

    cfg.lambda = 0.0;
    const ReversalModel free = greedy_reversal(a, cfg);
    for (std::size_t j = 0; j < m; ++j) CHECK(free.shifts[0][j] == long(j));
}

TEST_CASE("pivoting kicks in on stagnation") {
    // two pulses with different speeds: one pivot cannot explain both
    const std::size_t n = 40, m = 12;
    Matrix data = Matrix::Zero(n, m);
    const Vector slow = oracle::gaussian(n, 0.2, 0.03);
    const Vector fast = 0.7 * oracle::gaussian(n, 0.6, 0.05);
    for (std::size_t j = 0; j < m; ++j) {
        data.col(long(j)) = oracle::shift_matrix(n, long(j)) * slow + oracle::shift_matrix(n, 2 * long(j)) * fast;
    }
    ReversalConfig cfg;
    cfg.max_iterations = 10;
    cfg.pivot_trigger = 0.95;
    cfg.adaptive_lambda = false;
    for (PivotStrategy s : {PivotStrategy::NextColumn, PivotStrategy::MaxNormColumn, PivotStrategy::Orthogonal}) {
        cfg.pivot_strategy = s;
        const ReversalModel model = greedy_reversal(SnapshotMatrix(data), cfg);
        model.validate();
        for (std::size_t k = 1; k < model.residual_history.size(); ++k) {
            CHECK(model.residual_history[k] <= model.residual_history[k - 1]);
        }
    }
}

TEST_CASE("greedy rejects bad input") {
    CHECK_THROWS_AS(greedy_reversal(SnapshotMatrix(Matrix(0, 0)), {}), DimensionError);
    ReversalConfig cfg;
    cfg.lambda = -1;
    CHECK_THROWS_AS(greedy_reversal(SnapshotMatrix(Matrix::Ones(3, 3)), cfg), InvalidArgument);
}

TEST_CASE("model validation catches inconsistent blocks") {
    const SnapshotMatrix a(Matrix::Identity(6, 6));
    ReversalModel m = greedy_reversal(a, {});
    m.scalings.clear();
    CHECK_THROWS_AS(m.validate(), DimensionError);
    m = greedy_reversal(a, {});
    m.pivot_schedule[0] = 7;
    CHECK_THROWS_AS(reconstruct(m), DimensionError);
}
