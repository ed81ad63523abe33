#include "transrev/reversal_real.hpp"

#include "transrev/errors.hpp"
#include "transrev/parallel.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace transrev {

namespace {

/// a' L a = -sum (a_{i+1} - a_i)^2, summed as squares for accuracy.
double quadratic_laplacian(const GridField& a) {
    const std::size_t n = a.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[(i + 1) % n] - a[i];
        s += d * d;
    }
    return -s;
}

/// (L a)_i = a_{i-1} - 2 a_i + a_{i+1}, without the 1/h^2 factor.
Vector unscaled_laplacian(const GridField& a) {
    const std::size_t n = a.size();
    Vector out(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        out[static_cast<Eigen::Index>(i)] = a[(i + n - 1) % n] - 2.0 * a[i] + a[(i + 1) % n];
    }
    return out;
}

/// (K^s b)' v
double shifted_dot(const GridField& b, long s, const Vector& v) {
    const std::size_t n = b.size();
    const std::size_t k = mod_index(s, n);
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) d += b[(i + n - k) % n] * v[static_cast<Eigen::Index>(i)];
    return d;
}

void require_same_size(const GridField& a, const GridField& b, const char* what) {
    if (a.size() != b.size()) throw DimensionError(std::string(what) + ": length mismatch");
}

void require_nonconstant(const GridField& a, const char* what) {
    if (is_constant(a)) throw ConstantVectorError(std::string(what) + ": input vector is constant");
}

double wrapped_magnitude(double omega, std::size_t n) {
    const double ln = static_cast<double>(n);
    double w = std::fmod(omega, ln);
    if (w < 0) w += ln;
    if (2.0 * w > ln) w -= ln;
    return std::abs(w);
}

}  // namespace

bool is_constant(const GridField& a) {
    if (a.size() == 0) return true;
    const double scale = a.max_abs();
    if (scale == 0.0) return true;
    const double lo = a.values().minCoeff();
    const double hi = a.values().maxCoeff();
    return hi - lo <= 1e-13 * scale;
}

double optimal_fraction(const GridField& a, const GridField& b) {
    require_same_size(a, b, "optimal_fraction");
    require_nonconstant(a, "optimal_fraction");
    const std::size_t n = a.size();
    double adb = 0.0;
    for (std::size_t i = 0; i < n; ++i) adb += a[i] * (b[(i + n - 1) % n] - b[i]);
    return 0.5 - adb / quadratic_laplacian(a);
}

double recursion_step(double previous, const GridField& a, const GridField& b, long s, Direction dir) {
    require_same_size(a, b, "recursion_step");
    require_nonconstant(a, "recursion_step");
    const Vector la = unscaled_laplacian(a);
    const double denom = quadratic_laplacian(a);
    if (dir == Direction::Plus) return previous - shifted_dot(b, s + 1, la) / denom;
    return previous + shifted_dot(b, -s, la) / denom;
}

double real_shift_objective(const GridField& a, const GridField& b, double omega) {
    require_same_size(a, b, "real_shift_objective");
    return (b.values() - shift_real(a, -omega).values()).squaredNorm();
}

std::size_t detect_period(const GridField& a) {
    require_nonconstant(a, "detect_period");
    const std::size_t n = a.size();
    std::vector<double> magnitude(n, 0.0);
    double peak = 0.0;
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t k = 1; k < n; ++k) {
        std::complex<double> f = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double phase = -two_pi * static_cast<double>((k * j) % n) / static_cast<double>(n);
            f += a[j] * std::polar(1.0, phase);
        }
        magnitude[k] = std::abs(f);
        peak = std::max(peak, magnitude[k]);
    }
    if (!(peak > 0.0)) throw ConstantVectorError("detect_period: input vector is constant");
    std::size_t g = n;
    for (std::size_t k = 1; k < n; ++k) {
        if (magnitude[k] > 1e-10 * peak) g = std::gcd(g, k);
    }
    return n / g;
}

RealShiftFit best_real_shift(const GridField& a, const GridField& b) {
    require_same_size(a, b, "best_real_shift");
    const std::size_t n = a.size();
    const std::size_t period = detect_period(a);
    const Vector la = unscaled_laplacian(a);
    const double denom = quadratic_laplacian(a);

    RealShiftFit fit;
    auto& set = fit.candidates;
    set.candidates.reserve(2 * period);
    set.objective_values.reserve(2 * period);
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](double omega) {
        const double v = real_shift_objective(a, b, omega);
        set.candidates.push_back(omega);
        set.objective_values.push_back(v);
        if (v < best || (v == best && wrapped_magnitude(omega, n) < wrapped_magnitude(fit.shift, n))) {
            best = v;
            fit.shift = omega;
        }
    };

    double nu = optimal_fraction(a, b);
    for (std::size_t s = 0; s < period; ++s) {
        const double base = static_cast<double>(s);
        consider(base);
        if (nu > 0.0 && nu < 1.0) consider(base + nu);
        nu -= shifted_dot(b, static_cast<long>(s) + 1, la) / denom;
    }
    fit.objective = best;
    return fit;
}

RealReversal reverse_real(const SnapshotMatrix& a, const GridField& pivot) {
    const std::size_t n = a.n_cells();
    const std::size_t m = a.n_snaps();
    if (pivot.size() != n) throw DimensionError("reverse_real: pivot length mismatch");
    require_nonconstant(pivot, "reverse_real pivot");
    for (std::size_t j = 0; j < m; ++j) {
        if (is_constant(a.column(j))) {
            throw ConstantVectorError("reverse_real: column " + std::to_string(j) + " is constant",
                                      static_cast<long>(j));
        }
    }
    RealReversal out{std::vector<double>(m), a, std::vector<std::pair<double, double>>(m)};
    Matrix reversed(a.data().rows(), a.data().cols());
    parallel_for(m, [&](std::size_t j) {
        const GridField column = a.column(j);
        const RealShiftFit fit = best_real_shift(column, pivot);
        out.shifts[j] = fit.shift;
        out.boundaries[j] = {column[0], column[n - 1]};
        reversed.col(static_cast<Eigen::Index>(j)) = shift_real(column, -fit.shift).values();
    });
    out.reversed = a.with_data(std::move(reversed));
    return out;
}

GridField sharpen(const GridField& smeared, double nu_fraction, double left, double right) {
    if (!(nu_fraction >= 0.0 && nu_fraction <= 1.0)) {
        throw CflError("sharpen: fractional shift " + std::to_string(nu_fraction) + " outside [0, 1]");
    }
    const std::size_t n = smeared.size();
    const double beta = nu_fraction * (1.0 - nu_fraction);
    if (beta == 0.0 || n == 0) return smeared;
    Vector u(static_cast<Eigen::Index>(n));
    if (n <= 2) {
        u[0] = left;
        if (n == 2) u[1] = right;
        return GridField(std::move(u));
    }
    // Thomas algorithm on the pinned tridiagonal system.
    const double diag = 1.0 - 2.0 * beta;
    std::vector<double> c(n, 0.0), d(n, 0.0);
    c[0] = 0.0;
    d[0] = left;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double denom = diag - beta * c[i - 1];
        if (denom == 0.0 || !std::isfinite(denom)) throw NumericalError("sharpen: singular system");
        c[i] = beta / denom;
        d[i] = (smeared[i] - beta * d[i - 1]) / denom;
    }
    d[n - 1] = right;
    u[static_cast<Eigen::Index>(n - 1)] = right;
    for (std::size_t i = n - 1; i-- > 0;) {
        u[static_cast<Eigen::Index>(i)] = d[i] - c[i] * u[static_cast<Eigen::Index>(i + 1)];
    }
    u[0] = left;
    return GridField(std::move(u));
}

SnapshotMatrix forward_transport(const SnapshotMatrix& reversed, const std::vector<double>& shifts) {
    return transport_columns_real(reversed, shifts);
}

SnapshotMatrix sharpened_reconstruct(const SnapshotMatrix& reversed, const std::vector<double>& shifts,
                                     const std::vector<std::pair<double, double>>& boundaries) {
    const std::size_t m = reversed.n_snaps();
    if (shifts.size() != m || boundaries.size() != m) {
        throw DimensionError("sharpened_reconstruct: expected one shift and one boundary pair per column");
    }
    Matrix out(reversed.data().rows(), reversed.data().cols());
    parallel_for(m, [&](std::size_t j) {
        const RealShift shift(shifts[j]);
        const GridField moved = shift_real(reversed.column(j), shift);
        const GridField sharp =
            sharpen(moved, shift.fractional_part(), boundaries[j].first, boundaries[j].second);
        out.col(static_cast<Eigen::Index>(j)) = sharp.values();
    });
    return reversed.with_data(std::move(out));
}

}  // namespace transrev
