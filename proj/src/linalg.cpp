#include "ace/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace ace {

bool cholesky_factor(const Matrix& a, Matrix& lower) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("cholesky_factor: matrix not square");
    lower.resize(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = a(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= lower(i, k) * lower(j, k);
            if (i == j) {
                if (!(sum > 0.0) || !std::isfinite(sum)) return false;
                lower(i, i) = std::sqrt(sum);
            } else {
                lower(i, j) = sum / lower(j, j);
            }
        }
    }
    return true;
}

double cholesky_log_det(const Matrix& lower) {
    double log_det = 0.0;
    for (std::size_t i = 0; i < lower.rows(); ++i) log_det += std::log(lower(i, i));
    return 2.0 * log_det;
}

void cholesky_solve(const Matrix& lower, std::span<const double> b, std::span<double> x) {
    const std::size_t n = lower.rows();
    if (b.size() != n || x.size() != n) {
        throw std::invalid_argument("cholesky_solve: size mismatch");
    }
    // Forward substitution L y = b, then back substitution L^T x = y.
    for (std::size_t i = 0; i < n; ++i) {
        double sum = b[i];
        for (std::size_t k = 0; k < i; ++k) sum -= lower(i, k) * x[k];
        x[i] = sum / lower(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double sum = x[ii];
        for (std::size_t k = ii + 1; k < n; ++k) sum -= lower(k, ii) * x[k];
        x[ii] = sum / lower(ii, ii);
    }
}

double cholesky_inverse_trace(const Matrix& lower) {
    // tr(A^{-1}) = sum of squared entries of L^{-1}.
    const std::size_t n = lower.rows();
    Matrix inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        inv(j, j) = 1.0 / lower(j, j);
        for (std::size_t i = j + 1; i < n; ++i) {
            double sum = 0.0;
            for (std::size_t k = j; k < i; ++k) sum -= lower(i, k) * inv(k, j);
            inv(i, j) = sum / lower(i, i);
        }
    }
    double trace = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = j; i < n; ++i) trace += inv(i, j) * inv(i, j);
    }
    return trace;
}

} // namespace ace
