#pragma once

#include "transrev/grid.hpp"

#include <optional>
#include <span>

namespace transrev {

/// Canonical representative of s modulo n in (-n/2, n/2].
long wrap_shift(long s, std::size_t n);

/// Representative of s modulo n in [0, n).
std::size_t mod_index(long s, std::size_t n);

// Span kernels. `out` must not alias `in` and must have the same length.
void shift_integer(std::span<const double> in, long s, std::span<double> out);
void shift_fractional(std::span<const double> in, double nu, std::span<double> out);
void shift_real(std::span<const double> in, const RealShift& shift, std::span<double> out);

/// Periodic permutation: out[i] = f[(i - s) mod N]. Bit-exact.
GridField shift_integer(const GridField& f, long s);

/// Single upwind step (1 - nu) f + nu K f for nu in [0, 1]; throws CflError otherwise.
GridField shift_fractional(const GridField& f, double nu);

/// Large-step upwind transport K^s K(nu) with s = floor(value), nu the remainder.
GridField shift_real(const GridField& f, const RealShift& shift);
inline GridField shift_real(const GridField& f, double value) { return shift_real(f, RealShift(value)); }

/// Action of the transpose of shift_real; equals shift_real(f, -value).
GridField shift_real_adjoint(const GridField& f, const RealShift& shift);

/// Periodic second difference divided by h^2.
GridField discrete_laplacian(const GridField& f);

/// Column-wise integer transport h_j * rho_j (.) K^{nu_j} a_j.
/// Scalings and cut-offs are optional; shapes are checked.
SnapshotMatrix transport_columns(const SnapshotMatrix& a, std::span<const long> shifts,
                                 std::optional<std::span<const double>> scalings = std::nullopt,
                                 const CutoffMatrix* cutoffs = nullptr);

/// Column-wise real transport K~(nu_j) a_j, optionally scaled.
SnapshotMatrix transport_columns_real(const SnapshotMatrix& a, std::span<const double> shifts,
                                      std::optional<std::span<const double>> scalings = std::nullopt);

/// Vector version: column j is h_j * rho_j (.) K^{nu_j} b. Rows/cols of the
/// result are (b.size(), shifts.size()).
Matrix transport_pivot(const GridField& b, std::span<const long> shifts,
                       std::optional<std::span<const double>> scalings = std::nullopt,
                       const CutoffMatrix* cutoffs = nullptr);

}  // namespace transrev
