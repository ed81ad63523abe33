#include "transrev/grid.hpp"

#include "transrev/errors.hpp"

#include <cmath>
#include <string>

namespace transrev {

namespace {

void require_finite(const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw NumericalError("grid field entry " + std::to_string(i) + " is not finite");
        }
    }
}

}  // namespace

GridField::GridField(std::size_t n_cells) : values_(Vector::Zero(static_cast<Eigen::Index>(n_cells))) {}

GridField::GridField(Vector values) : values_(std::move(values)) { require_finite(values_); }

GridField::GridField(std::initializer_list<double> values)
    : values_(static_cast<Eigen::Index>(values.size())) {
    Eigen::Index i = 0;
    for (double v : values) values_[i++] = v;
    require_finite(values_);
}

GridField::GridField(std::span<const double> values)
    : values_(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()))) {
    require_finite(values_);
}

GridField GridField::unit(std::size_t n_cells, std::size_t index, double scale) {
    if (index >= n_cells) throw DimensionError("unit vector index out of range");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(n_cells));
    v[static_cast<Eigen::Index>(index)] = scale;
    return GridField(std::move(v));
}

RealShift::RealShift(double value) : value_(value) {
    if (!std::isfinite(value)) throw NumericalError("shift number is not finite");
    double fl = std::floor(value);
    double frac = value - fl;
    // value slightly below an integer can round the remainder up to 1.
    if (frac >= 1.0) {
        fl += 1.0;
        frac = 0.0;
    }
    integral_ = static_cast<long>(fl);
    fraction_ = frac;
}

std::vector<bool> CutoffMatrix::column(std::size_t j) const {
    if (j >= cols_) throw DimensionError("cut-off column out of range");
    return {bits_.begin() + static_cast<std::ptrdiff_t>(j * rows_),
            bits_.begin() + static_cast<std::ptrdiff_t>((j + 1) * rows_)};
}

void CutoffMatrix::set_column(std::size_t j, const std::vector<bool>& mask) {
    if (j >= cols_ || mask.size() != rows_) throw DimensionError("cut-off column shape mismatch");
    for (std::size_t i = 0; i < rows_; ++i) bits_[j * rows_ + i] = mask[i];
}

SnapshotMatrix::SnapshotMatrix(Matrix data) : data_(std::move(data)) {
    times_.resize(static_cast<std::size_t>(data_.cols()));
    for (std::size_t j = 0; j < times_.size(); ++j) times_[j] = static_cast<double>(j);
    validate();
}

SnapshotMatrix::SnapshotMatrix(Matrix data, std::vector<double> times)
    : data_(std::move(data)), times_(std::move(times)) {
    validate();
}

SnapshotMatrix SnapshotMatrix::from_columns(const std::vector<GridField>& columns,
                                            std::vector<double> times) {
    if (columns.empty()) return SnapshotMatrix(Matrix(0, 0));
    const auto n = static_cast<Eigen::Index>(columns.front().size());
    Matrix data(n, static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (static_cast<Eigen::Index>(columns[j].size()) != n) {
            throw DimensionError("columns have different lengths");
        }
        data.col(static_cast<Eigen::Index>(j)) = columns[j].values();
    }
    if (times.empty()) return SnapshotMatrix(std::move(data));
    return SnapshotMatrix(std::move(data), std::move(times));
}

GridField SnapshotMatrix::column(std::size_t j) const {
    if (j >= n_snaps()) throw DimensionError("snapshot column out of range");
    return GridField(Vector(data_.col(static_cast<Eigen::Index>(j))));
}

SnapshotMatrix SnapshotMatrix::with_data(Matrix data) const {
    if (data.rows() != data_.rows() || data.cols() != data_.cols()) {
        throw DimensionError("replacement data has a different shape");
    }
    return SnapshotMatrix(std::move(data), times_);
}

void SnapshotMatrix::validate() const {
    if (times_.size() != static_cast<std::size_t>(data_.cols())) {
        throw DimensionError("times has " + std::to_string(times_.size()) + " entries for " +
                             std::to_string(data_.cols()) + " snapshots");
    }
    if (!data_.allFinite()) throw NumericalError("snapshot matrix contains non-finite entries");
    for (std::size_t j = 0; j < times_.size(); ++j) {
        if (!std::isfinite(times_[j])) throw NumericalError("snapshot time is not finite");
        if (j > 0 && !(times_[j] > times_[j - 1])) {
            throw InvalidArgument("snapshot times must be strictly increasing");
        }
    }
}

}  // namespace transrev
