#pragma once

#include "transrev/grid.hpp"

#include <vector>

namespace transrev {

struct RankCriterion {
    enum class Kind { FixedRank, Energy } kind = Kind::Energy;
    std::size_t rank = 0;  ///< used for FixedRank
    double epsilon = 0.01; ///< used for Energy, in (0, 1)

    static RankCriterion fixed(std::size_t r) { return {Kind::FixedRank, r, 0.0}; }
    static RankCriterion energy(double eps) { return {Kind::Energy, 0, eps}; }
};

struct SvdReduction {
    Vector singular_values;  ///< all min(N, M), nonincreasing
    Matrix left_vectors;     ///< N x R
    Matrix right_vectors;    ///< M x R
    std::size_t rank = 0;
    Vector column_mean;      ///< subtracted mean (size N), empty when not used

    /// Rank-R approximation, with the mean added back.
    Matrix reconstruct() const;
    /// sum_{j>R} sigma_j^2 / sum sigma_j^2
    double discarded_energy() const;
};

/// Smallest R with sum_{j>R} s_j^2 / sum s_j^2 < epsilon. Throws for epsilon outside (0, 1).
std::size_t energy_rank(const Vector& singular_values, double epsilon);

SvdReduction reduce(const SnapshotMatrix& a, const RankCriterion& criterion, bool subtract_mean = false);

/// Singular values only.
Vector singular_values(const Matrix& a);

enum class Normalization { Frobenius, TimeSpace };

/// |A - B|_F, divided by sqrt(N M) for TimeSpace.
double l2_error(const Matrix& a, const Matrix& b, Normalization norm = Normalization::Frobenius);
double l2_error(const SnapshotMatrix& a, const SnapshotMatrix& b, Normalization norm = Normalization::Frobenius);

/// Per-column |a_j - b_j|_2 / sqrt(N).
std::vector<double> column_errors(const Matrix& a, const Matrix& b);

}  // namespace transrev
