#pragma once

#include "transrev/core_ops.hpp"
#include "transrev/grid.hpp"

#include <optional>
#include <vector>

namespace transrev {

/// Result of projecting a snapshot onto a (shifted) pivot.
struct Projection {
    double scaling = 0.0;  ///< <b,a>/|b|^2, or 0 for a zero pivot
    GridField projected;   ///< scaling * b
};

/// Orthogonal projection of `a` onto span{b}; zero when b == 0.
Projection project(const GridField& a, const GridField& b);

/// Cut-off predicate: entry i is kept iff sign(a_i - b_i) sign(a_i) >= 0
/// and |a_i - b_i| <= |a_i|, with `scaled_pivot` playing b.
std::vector<bool> cutoff(const GridField& a, const GridField& scaled_pivot);

/// Optimal integer shift together with the scaling and cut-off it induces.
struct ShiftFit {
    long shift = 0;  ///< canonical representative in (-N/2, N/2]
    double scaling = 0.0;
    std::vector<bool> mask;
    double misfit = 0.0;  ///< |a - rho (.) P(a; K^shift b)|^2, penalty excluded
};

/// Penalty that ties a column's shift to its predecessors in time.
struct ShiftPenalty {
    double lambda = 0.0;                 ///< weight on |omega - prev|^2
    std::optional<long> previous;        ///< shift of column j-1
    double second_order = 0.0;           ///< weight on the wrapped second difference
    std::optional<long> before_previous; ///< shift of column j-2
};

/// Unpenalized misfit J(omega) for every omega, indexed by omega mod N.
std::vector<double> shift_misfits(const GridField& a, const GridField& b);

/// Exhaustive scan over all N integer shifts of the pivot `b`.
/// Ties go to the smallest |omega|, then to the positive representative.
ShiftFit find_shift(const GridField& a, const GridField& b, const ShiftPenalty& penalty = {});

/// coefficient / (C N) with C = max J - min J of the unpenalized misfit; 0 when C == 0.
double adaptive_lambda(const GridField& a, const GridField& b, double coefficient = 2.5);

enum class PivotStrategy {
    NextColumn,     ///< column l+1 of the current residual
    MaxNormColumn,  ///< residual column of largest 2-norm
    Orthogonal,     ///< column l+1, orthogonalized against the previous pivot
};

struct ReversalConfig {
    std::size_t max_iterations = 15;
    double residual_tolerance = 0.0;  ///< stop once |R|_F < tau0
    double pivot_trigger = 1.0;       ///< pivot when |R_new|/|R_old| > tau1
    bool adaptive_lambda = true;
    double lambda = 0.0;              ///< used when adaptive_lambda is false
    double adaptive_coefficient = 2.5;
    double second_order_penalty = 0.0;
    PivotStrategy pivot_strategy = PivotStrategy::NextColumn;

    void validate() const;
};

/// Compressed output of the greedy reversal: pivots B, shifts V, scalings H,
/// cut-offs Q, the pivot used at each iteration and the residual history.
struct ReversalModel {
    std::size_t n_cells = 0;
    std::size_t n_snaps = 0;
    std::vector<double> times;
    std::vector<GridField> pivots;
    std::vector<std::vector<long>> shifts;      ///< [iteration][column]
    std::vector<std::vector<double>> scalings;  ///< [iteration][column]
    std::vector<CutoffMatrix> cutoffs;          ///< one N x M mask per iteration
    std::vector<std::size_t> pivot_schedule;    ///< iteration -> index into pivots
    std::vector<double> residual_history;       ///< |R_k|_F, k = 0..K

    std::size_t iterations() const noexcept { return shifts.size(); }
    /// Residual in the time-space L2 norm |R|_F / sqrt(N M).
    double final_residual_time_space() const;
    /// Number of times the pivot changed.
    std::size_t pivot_changes() const noexcept { return pivots.empty() ? 0 : pivots.size() - 1; }

    void validate() const;
    bool operator==(const ReversalModel&) const = default;
};

/// Greedy transport reversal. Columns are fitted in time order within each
/// iteration; the pivot starts at the first column of the data.
ReversalModel greedy_reversal(const SnapshotMatrix& a, const ReversalConfig& cfg);

/// Contribution of one iteration, T(b; nu_k, h_k, P_k).
Matrix iteration_contribution(const ReversalModel& model, std::size_t iteration);

/// Sum of all iteration contributions.
SnapshotMatrix reconstruct(const ReversalModel& model);

}  // namespace transrev
