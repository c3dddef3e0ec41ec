#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ace {

// Dense row-major matrix. Sized for the small systems this project solves
// (p x p information matrices, m x m emulator kernels).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    void resize(std::size_t rows, std::size_t cols) {
        rows_ = rows;
        cols_ = cols;
        data_.assign(rows * cols, 0.0);
    }

    void fill(double value) { std::fill(data_.begin(), data_.end(), value); }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Lower Cholesky factor of a symmetric matrix; false if the matrix is not
/// numerically positive definite. Only the lower triangle of `a` is read.
bool cholesky_factor(const Matrix& a, Matrix& lower);

/// log det(A) from its lower Cholesky factor.
double cholesky_log_det(const Matrix& lower);

/// Solve A x = b given the lower Cholesky factor of A.
void cholesky_solve(const Matrix& lower, std::span<const double> b, std::span<double> x);

/// tr(A^{-1}) given the lower Cholesky factor of A.
double cholesky_inverse_trace(const Matrix& lower);

} // namespace ace
