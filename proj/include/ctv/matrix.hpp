#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace ctv {

/// Dense row-major matrix of doubles. Degenerate shapes (zero rows or zero
/// columns) are valid and behave as empty ranges while keeping both extents.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }
    double operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    bool all_finite() const {
        for (double x : data_)
            if (!std::isfinite(x)) return false;
        return true;
    }

    void fill(double value) {
        for (double& x : data_) x = value;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline double dot(const Matrix& a, const Matrix& b) {
    assert(a.same_shape(b));
    double acc = 0.0;
    const double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t i = 0; i < a.size(); ++i) acc += pa[i] * pb[i];
    return acc;
}

inline double sum(const Matrix& a) {
    double acc = 0.0;
    for (double x : a) acc += x;
    return acc;
}

inline double sum_squares(const Matrix& a) {
    double acc = 0.0;
    for (double x : a) acc += x * x;
    return acc;
}

}  // namespace ctv
