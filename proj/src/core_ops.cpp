#include "transrev/core_ops.hpp"

#include "transrev/errors.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace transrev {

long wrap_shift(long s, std::size_t n) {
    if (n == 0) return 0;
    const long ln = static_cast<long>(n);
    long r = ((s % ln) + ln) % ln;  // [0, n)
    if (2 * r > ln) r -= ln;        // (-n/2, n/2]
    return r;
}

std::size_t mod_index(long s, std::size_t n) {
    const long ln = static_cast<long>(n);
    return static_cast<std::size_t>(((s % ln) + ln) % ln);
}

void shift_integer(std::span<const double> in, long s, std::span<double> out) {
    const std::size_t n = in.size();
    if (out.size() != n) throw DimensionError("shift_integer: output length mismatch");
    if (n == 0) return;
    const std::size_t k = mod_index(s, n);
    // out[i] = in[(i - k) mod n]
    for (std::size_t i = 0; i < k; ++i) out[i] = in[n - k + i];
    for (std::size_t i = k; i < n; ++i) out[i] = in[i - k];
}

void shift_fractional(std::span<const double> in, double nu, std::span<double> out) {
    if (!(nu >= 0.0 && nu <= 1.0)) {
        throw CflError("fractional shift " + std::to_string(nu) + " outside [0, 1]");
    }
    const std::size_t n = in.size();
    if (out.size() != n) throw DimensionError("shift_fractional: output length mismatch");
    if (n == 0) return;
    if (nu == 1.0) {
        shift_integer(in, 1, out);
        return;
    }
    if (nu == 0.0) {
        std::copy(in.begin(), in.end(), out.begin());
        return;
    }
    const double keep = 1.0 - nu;
    out[0] = keep * in[0] + nu * in[n - 1];
    for (std::size_t i = 1; i < n; ++i) out[i] = keep * in[i] + nu * in[i - 1];
}

void shift_real(std::span<const double> in, const RealShift& shift, std::span<double> out) {
    const std::size_t n = in.size();
    if (out.size() != n) throw DimensionError("shift_real: output length mismatch");
    if (n == 0) return;
    const double nu = shift.fractional_part();
    if (nu == 0.0) {
        shift_integer(in, shift.integral_part(), out);
        return;
    }
    // K^s K(nu): out[i] = (1 - nu) in[i - s] + nu in[i - s - 1]
    const std::size_t k = mod_index(shift.integral_part(), n);
    const double keep = 1.0 - nu;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = (i + n - k) % n;
        const std::size_t up = (src + n - 1) % n;
        out[i] = keep * in[src] + nu * in[up];
    }
}

GridField shift_integer(const GridField& f, long s) {
    Vector out(f.values().size());
    shift_integer(f.span(), s, {out.data(), f.size()});
    return GridField(std::move(out));
}

GridField shift_fractional(const GridField& f, double nu) {
    Vector out(f.values().size());
    shift_fractional(f.span(), nu, {out.data(), f.size()});
    return GridField(std::move(out));
}

GridField shift_real(const GridField& f, const RealShift& shift) {
    Vector out(f.values().size());
    shift_real(f.span(), shift, {out.data(), f.size()});
    return GridField(std::move(out));
}

GridField shift_real_adjoint(const GridField& f, const RealShift& shift) {
    return shift_real(f, RealShift(-shift.value()));
}

GridField discrete_laplacian(const GridField& f) {
    const std::size_t n = f.size();
    Vector out(static_cast<Eigen::Index>(n));
    if (n == 0) return GridField(std::move(out));
    const double inv_h2 = static_cast<double>(n) * static_cast<double>(n);
    const auto& v = f.values();
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const auto lo = static_cast<Eigen::Index>((i + n - 1) % n);
        const auto hi = static_cast<Eigen::Index>((i + 1) % n);
        out[ii] = (v[lo] - 2.0 * v[ii] + v[hi]) * inv_h2;
    }
    return GridField(std::move(out));
}

namespace {

void check_transport_shapes(std::size_t n, std::size_t m, std::size_t n_shifts,
                            std::optional<std::span<const double>> scalings,
                            const CutoffMatrix* cutoffs) {
    if (n_shifts != m) {
        throw DimensionError("expected " + std::to_string(m) + " shift numbers, got " +
                             std::to_string(n_shifts));
    }
    if (scalings && scalings->size() != m) throw DimensionError("scalings length mismatch");
    if (cutoffs && (cutoffs->rows() != n || cutoffs->cols() != m)) {
        throw DimensionError("cut-off matrix shape mismatch");
    }
}

void apply_scaling_and_cutoff(double* col, std::size_t n, std::size_t j,
                              std::optional<std::span<const double>> scalings,
                              const CutoffMatrix* cutoffs) {
    if (scalings) {
        const double h = (*scalings)[j];
        for (std::size_t i = 0; i < n; ++i) col[i] *= h;
    }
    if (cutoffs) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!(*cutoffs)(i, j)) col[i] = 0.0;
        }
    }
}

}  // namespace

SnapshotMatrix transport_columns(const SnapshotMatrix& a, std::span<const long> shifts,
                                 std::optional<std::span<const double>> scalings,
                                 const CutoffMatrix* cutoffs) {
    const std::size_t n = a.n_cells();
    const std::size_t m = a.n_snaps();
    check_transport_shapes(n, m, shifts.size(), scalings, cutoffs);
    Matrix out(a.data().rows(), a.data().cols());
    for (std::size_t j = 0; j < m; ++j) {
        double* col = out.col(static_cast<Eigen::Index>(j)).data();
        shift_integer(a.column_span(j), shifts[j], {col, n});
        apply_scaling_and_cutoff(col, n, j, scalings, cutoffs);
    }
    return a.with_data(std::move(out));
}

SnapshotMatrix transport_columns_real(const SnapshotMatrix& a, std::span<const double> shifts,
                                      std::optional<std::span<const double>> scalings) {
    const std::size_t n = a.n_cells();
    const std::size_t m = a.n_snaps();
    check_transport_shapes(n, m, shifts.size(), scalings, nullptr);
    Matrix out(a.data().rows(), a.data().cols());
    for (std::size_t j = 0; j < m; ++j) {
        double* col = out.col(static_cast<Eigen::Index>(j)).data();
        shift_real(a.column_span(j), RealShift(shifts[j]), {col, n});
        apply_scaling_and_cutoff(col, n, j, scalings, nullptr);
    }
    return a.with_data(std::move(out));
}

Matrix transport_pivot(const GridField& b, std::span<const long> shifts,
                       std::optional<std::span<const double>> scalings,
                       const CutoffMatrix* cutoffs) {
    const std::size_t n = b.size();
    const std::size_t m = shifts.size();
    check_transport_shapes(n, m, m, scalings, cutoffs);
    Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
        double* col = out.col(static_cast<Eigen::Index>(j)).data();
        shift_integer(b.span(), shifts[j], {col, n});
        apply_scaling_and_cutoff(col, n, j, scalings, cutoffs);
    }
    return out;
}

}  // namespace transrev
