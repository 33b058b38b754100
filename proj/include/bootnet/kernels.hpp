#ifndef BOOTNET_KERNELS_HPP_
#define BOOTNET_KERNELS_HPP_

#include <span>
#include <vector>

#include "bootnet/matrix.hpp"

namespace bootnet {

// Data-parallel kernels. Parallelism is over independent output rows or
// columns only; every output element accumulates in a fixed serial order,
// so results are identical for any thread count. A plain serial version of
// each kernel lives in bootnet::reference for testing and benchmarking.

/// Standard product a[m x k] * b[k x n]. Throws std::invalid_argument on
/// inner-dimension mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);

/// a^T * b without materializing the transpose.
Matrix matmul_at_b(const Matrix& a, const Matrix& b);

/// a * b^T without materializing the transpose.
Matrix matmul_a_bt(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

/// Row-wise softmax of exp(temperature * z), max-subtracted for stability.
/// Rows sum to 1. Throws std::invalid_argument if temperature <= 0.
Matrix softmax_rows(const Matrix& z, double temperature = 1.0);

/// Elementwise 1 / (1 + exp(-z)).
Matrix logistic(const Matrix& z);

Matrix relu(const Matrix& z);

/// dz = da where z > 0, else 0.
Matrix relu_backward(const Matrix& da, const Matrix& z);

/// m(r, :) += v for every row r.
void add_row_vector(Matrix& m, std::span<const double> v);

std::vector<double> column_sums(const Matrix& m);

/// y += alpha * x (shapes must match).
void axpy(double alpha, const Matrix& x, Matrix& y);

}  // namespace bootnet

#endif  // BOOTNET_KERNELS_HPP_
