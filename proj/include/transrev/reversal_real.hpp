#pragma once

#include "transrev/core_ops.hpp"
#include "transrev/grid.hpp"

#include <utility>
#include <vector>

namespace transrev {

/// True when every entry equals the mean within 1e-13 relative to max|a|.
bool is_constant(const GridField& a);

/// Unconstrained minimizer of w -> |b - K(w)^T a|^2, i.e. 1/2 - a'Db / a'La
/// with D = K - I and L = K + K^T - 2I. Throws ConstantVectorError for constant a.
double optimal_fraction(const GridField& a, const GridField& b);

enum class Direction { Plus, Minus };

/// Advances the fractional minimizer from offset s to s + 1.
/// Plus:  nu_s = optimal_fraction((K^T)^s a, b).
/// Minus: nu_s = optimal_fraction(K^s a, b).
double recursion_step(double previous, const GridField& a, const GridField& b, long s, Direction dir);

/// Candidate real shifts and the objective |b - K~(w)^T a|^2 at each.
struct CandidateSet {
    std::vector<double> candidates;
    std::vector<double> objective_values;
};

struct RealShiftFit {
    double shift = 0.0;  ///< in [0, N)
    double objective = 0.0;
    CandidateSet candidates;
};

/// |b - K~(w)^T a|^2.
double real_shift_objective(const GridField& a, const GridField& b, double omega);

/// Smallest period L of a (a_{j+L} = a_j cyclically) from the gcd of its DFT support.
std::size_t detect_period(const GridField& a);

/// Minimizes the objective over the integer offsets s < L (L the period of a)
/// and the admissible fractional minimizers s + nu_s. Ties go to the smallest
/// wrapped |w|.
RealShiftFit best_real_shift(const GridField& a, const GridField& b);

struct RealReversal {
    std::vector<double> shifts;                           ///< one per column, in [0, N)
    SnapshotMatrix reversed;                              ///< column j is K~(-nu_j) a_j
    std::vector<std::pair<double, double>> boundaries;    ///< (first, last) entry of each a_j
};

/// Aligns every column of `a` to the pivot frame.
RealReversal reverse_real(const SnapshotMatrix& a, const GridField& pivot);

/// Solves (I + alpha L_h) u = smeared with alpha = nu (1 - nu) / N^2, the first
/// and last rows replaced by u_1 = left and u_N = right.
GridField sharpen(const GridField& smeared, double nu_fraction, double left, double right);

/// Column-wise forward transport by nu_j followed by sharpen().
SnapshotMatrix sharpened_reconstruct(const SnapshotMatrix& reversed, const std::vector<double>& shifts,
                                     const std::vector<std::pair<double, double>>& boundaries);

/// Column-wise forward transport by nu_j without sharpening.
SnapshotMatrix forward_transport(const SnapshotMatrix& reversed, const std::vector<double>& shifts);

}  // namespace transrev
