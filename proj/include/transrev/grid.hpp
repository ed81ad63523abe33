#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace transrev {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Cell averages on the periodic unit interval, N cells of width h = 1/N.
class GridField {
public:
    GridField() = default;
    explicit GridField(std::size_t n_cells);
    explicit GridField(Vector values);
    GridField(std::initializer_list<double> values);
    explicit GridField(std::span<const double> values);

    /// e_i scaled by `scale` (0-based index).
    static GridField unit(std::size_t n_cells, std::size_t index, double scale = 1.0);

    std::size_t n_cells() const noexcept { return static_cast<std::size_t>(values_.size()); }
    std::size_t size() const noexcept { return n_cells(); }
    double spacing() const noexcept { return 1.0 / static_cast<double>(values_.size()); }

    const Vector& values() const noexcept { return values_; }
    std::span<const double> span() const noexcept { return {values_.data(), n_cells()}; }

    double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

    double sum() const { return values_.sum(); }
    double norm() const { return values_.norm(); }
    double max_abs() const { return values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0; }

    bool operator==(const GridField& other) const {
        return values_.size() == other.values_.size() && values_ == other.values_;
    }

private:
    Vector values_;
};

/// Real shift number split as value = integral_part + fractional_part,
/// with fractional_part in [0, 1).
class RealShift {
public:
    RealShift() = default;
    explicit RealShift(double value);

    double value() const noexcept { return value_; }
    long integral_part() const noexcept { return integral_; }
    double fractional_part() const noexcept { return fraction_; }

private:
    double value_ = 0.0;
    long integral_ = 0;
    double fraction_ = 0.0;
};

/// N x M boolean mask stored as a packed bitset, column-major.
class CutoffMatrix {
public:
    CutoffMatrix() = default;
    CutoffMatrix(std::size_t rows, std::size_t cols, bool value = true)
        : rows_(rows), cols_(cols), bits_(rows * cols, value) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    bool operator()(std::size_t i, std::size_t j) const { return bits_[j * rows_ + i]; }
    void set(std::size_t i, std::size_t j, bool v) { bits_[j * rows_ + i] = v; }

    std::vector<bool> column(std::size_t j) const;
    void set_column(std::size_t j, const std::vector<bool>& mask);

    bool operator==(const CutoffMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<bool> bits_;
};

/// Snapshot matrix: columns are solution states at strictly increasing times.
class SnapshotMatrix {
public:
    SnapshotMatrix() = default;
    /// Times default to 0, 1, ..., M-1.
    explicit SnapshotMatrix(Matrix data);
    SnapshotMatrix(Matrix data, std::vector<double> times);
    /// Builds from a list of equally sized columns.
    static SnapshotMatrix from_columns(const std::vector<GridField>& columns,
                                       std::vector<double> times = {});

    std::size_t n_cells() const noexcept { return static_cast<std::size_t>(data_.rows()); }
    std::size_t n_snaps() const noexcept { return static_cast<std::size_t>(data_.cols()); }

    const Matrix& data() const noexcept { return data_; }
    const std::vector<double>& times() const noexcept { return times_; }

    GridField column(std::size_t j) const;
    std::span<const double> column_span(std::size_t j) const {
        return {data_.col(static_cast<Eigen::Index>(j)).data(), n_cells()};
    }

    double frobenius_norm() const { return data_.norm(); }

    /// Same times, new data of identical shape.
    SnapshotMatrix with_data(Matrix data) const;

    bool operator==(const SnapshotMatrix& other) const {
        return data_.rows() == other.data_.rows() && data_.cols() == other.data_.cols() &&
               data_ == other.data_ && times_ == other.times_;
    }

private:
    void validate() const;

    Matrix data_;
    std::vector<double> times_;
};

}  // namespace transrev
