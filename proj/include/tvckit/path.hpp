#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tvckit {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }
    std::span<const double> data() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// A finite decision sequence c(0..H); row t holds the n-vector c(t).
class Path {
public:
    Path() = default;
    Path(int horizon, int dim, double fill = 0.0);

    /// Builds a path from time-major values; values.size() must be (H+1)*dim.
    static Path from_values(int dim, std::vector<double> values);

    int horizon() const noexcept { return horizon_; }
    int dim() const noexcept { return dim_; }
    int length() const noexcept { return horizon_ + 1; }

    double& operator()(int t, int i) { return values_[index(t, i)]; }
    double operator()(int t, int i) const { return values_[index(t, i)]; }

    /// Bounds-checked access; throws Error(Window) outside 0..H.
    double at(int t, int i) const;

    std::span<const double> row(int t) const {
        return {values_.data() + static_cast<std::size_t>(t) * dim_,
                static_cast<std::size_t>(dim_)};
    }
    std::span<const double> values() const noexcept { return values_; }

    /// Copy of rows 0..horizon.
    Path truncated(int horizon) const;

    bool operator==(const Path&) const = default;

private:
    std::size_t index(int t, int i) const {
        return static_cast<std::size_t>(t) * dim_ + static_cast<std::size_t>(i);
    }

    int horizon_ = -1;
    int dim_ = 0;
    std::vector<double> values_;
};

}  // namespace tvckit
