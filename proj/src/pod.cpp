#include "transrev/pod.hpp"

#include "transrev/errors.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>

namespace transrev {

Matrix SvdReduction::reconstruct() const {
    const auto r = static_cast<Eigen::Index>(rank);
    Matrix out = left_vectors.leftCols(r) * singular_values.head(r).asDiagonal() *
                 right_vectors.leftCols(r).transpose();
    if (column_mean.size() > 0) out.colwise() += column_mean;
    return out;
}

double SvdReduction::discarded_energy() const {
    const double total = singular_values.squaredNorm();
    if (total == 0.0) return 0.0;
    const auto r = static_cast<Eigen::Index>(rank);
    return singular_values.tail(singular_values.size() - r).squaredNorm() / total;
}

std::size_t energy_rank(const Vector& s, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("energy threshold must lie in (0, 1)");
    const double total = s.squaredNorm();
    if (total == 0.0) return 0;
    for (Eigen::Index r = 0; r < s.size(); ++r) {
        if (s.tail(s.size() - r).squaredNorm() / total < epsilon) return static_cast<std::size_t>(r);
    }
    return static_cast<std::size_t>(s.size());
}

Vector singular_values(const Matrix& a) {
    if (a.size() == 0) return Vector();
    Eigen::BDCSVD<Matrix> svd(a);
    return svd.singularValues();
}

SvdReduction reduce(const SnapshotMatrix& a, const RankCriterion& criterion, bool subtract_mean) {
    Matrix data = a.data();
    SvdReduction out;
    if (subtract_mean) {
        out.column_mean = data.rowwise().mean();
        data.colwise() -= out.column_mean;
    }
    Eigen::BDCSVD<Matrix> svd(data, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.singular_values = svd.singularValues();
    const auto available = static_cast<std::size_t>(out.singular_values.size());
    if (criterion.kind == RankCriterion::Kind::FixedRank) {
        if (criterion.rank > available) {
            throw InvalidArgument("rank " + std::to_string(criterion.rank) + " exceeds " + std::to_string(available));
        }
        out.rank = criterion.rank;
    } else {
        out.rank = energy_rank(out.singular_values, criterion.epsilon);
    }
    const auto r = static_cast<Eigen::Index>(out.rank);
    out.left_vectors = svd.matrixU().leftCols(r);
    out.right_vectors = svd.matrixV().leftCols(r);
    return out;
}

double l2_error(const Matrix& a, const Matrix& b, Normalization norm) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("l2_error: shape mismatch");
    const double e = (a - b).norm();
    if (norm == Normalization::Frobenius || a.size() == 0) return e;
    return e / std::sqrt(static_cast<double>(a.rows()) * static_cast<double>(a.cols()));
}

double l2_error(const SnapshotMatrix& a, const SnapshotMatrix& b, Normalization norm) {
    return l2_error(a.data(), b.data(), norm);
}

std::vector<double> column_errors(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("column_errors: shape mismatch");
    std::vector<double> e(static_cast<std::size_t>(a.cols()));
    const double scale = std::sqrt(static_cast<double>(a.rows()));
    for (Eigen::Index j = 0; j < a.cols(); ++j) e[static_cast<std::size_t>(j)] = (a.col(j) - b.col(j)).norm() / scale;
    return e;
}

}  // namespace transrev
