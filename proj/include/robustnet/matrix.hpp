#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace robustnet {

// Dense row-major matrix of doubles. Rows are instances, columns are
// attributes or neurons. All operations below are pure functions and treat
// their inputs as immutable, so matrices can be shared across workers.
class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {
        if (rows == 0 || cols == 0) {
            throw std::invalid_argument("Matrix: dimensions must be at least 1x1, got " +
                                        shape_string(rows, cols));
        }
    }

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        if (rows.size() == 0 || rows.begin()->size() == 0) {
            throw std::invalid_argument("Matrix::from_rows: empty initializer");
        }
        Matrix m(rows.size(), rows.begin()->size());
        std::size_t i = 0;
        for (const auto& row : rows) {
            if (row.size() != m.cols_) {
                throw std::invalid_argument("Matrix::from_rows: ragged row " + std::to_string(i));
            }
            std::size_t j = 0;
            for (double v : row) m(i, j++) = v;
            ++i;
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

    const double* row_ptr(std::size_t r) const { return values_.data() + r * cols_; }
    double* row_ptr(std::size_t r) { return values_.data() + r * cols_; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    bool all_finite() const {
        for (double v : values_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    std::string shape() const { return shape_string(rows_, cols_); }

    bool operator==(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && values_ == other.values_;
    }

    static std::string shape_string(std::size_t rows, std::size_t cols) {
        return std::to_string(rows) + "x" + std::to_string(cols);
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> values_;
};

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: inner dimensions differ, " + a.shape() + " times " +
                                    b.shape());
    }
    Matrix out(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row_ptr(i);
        double* orow = out.row_ptr(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = arow[k];
            const double* brow = b.row_ptr(k);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                orow[j] += aik * brow[j];
            }
        }
    }
    return out;
}

inline Matrix add_row_broadcast(const Matrix& a, const Matrix& bias) {
    if (bias.rows() != 1 || bias.cols() != a.cols()) {
        throw std::invalid_argument("add_row_broadcast: bias must be 1x" +
                                    std::to_string(a.cols()) + ", got " + bias.shape());
    }
    Matrix out = a;
    const double* brow = bias.row_ptr(0);
    for (std::size_t i = 0; i < out.rows(); ++i) {
        double* orow = out.row_ptr(i);
        for (std::size_t j = 0; j < out.cols(); ++j) {
            orow[j] += brow[j];
        }
    }
    return out;
}

inline Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row_ptr(i);
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(j, i) = arow[j];
        }
    }
    return out;
}

// Per-row index of the maximum value; ties resolve to the lowest index so
// downstream accuracy numbers are deterministic.
inline std::vector<std::size_t> argmax_rows(const Matrix& a) {
    std::vector<std::size_t> out(a.rows(), 0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* row = a.row_ptr(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < a.cols(); ++j) {
            if (row[j] > row[best]) best = j;
        }
        out[i] = best;
    }
    return out;
}

}  // namespace robustnet
