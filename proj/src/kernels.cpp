#include "bootnet/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bootnet {

namespace {

void check_inner(int a_cols, int b_rows, const char* what) {
  if (a_cols != b_rows) {
    throw std::invalid_argument(std::string(what) + ": inner dimensions disagree (" +
                                std::to_string(a_cols) + " vs " + std::to_string(b_rows) + ")");
  }
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_inner(a.cols(), b.rows(), "matmul");
  const int m = a.rows(), kk = a.cols(), n = b.cols();
  Matrix c(m, n);
  const double* pa = a.data();
  const double* pb = b.data();
  double* pc = c.data();
  // k-blocked so a block of b stays cache-resident across the row sweep.
  // Every c[i][j] still accumulates in ascending-k order, so the result is
  // independent of the block size and of the thread count.
  constexpr int kBlock = 128;
  for (int k0 = 0; k0 < kk; k0 += kBlock) {
    const int k1 = std::min(kk, k0 + kBlock);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
      double* ci = pc + static_cast<std::size_t>(i) * n;
      const double* ai = pa + static_cast<std::size_t>(i) * kk;
      for (int k = k0; k < k1; ++k) {
        const double aik = ai[k];
        const double* bk = pb + static_cast<std::size_t>(k) * n;
#pragma omp simd
        for (int j = 0; j < n; ++j) ci[j] += aik * bk[j];
      }
    }
  }
  return c;
}

Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
  check_inner(a.rows(), b.rows(), "matmul_at_b");
  const int n = a.rows(), p = a.cols(), q = b.cols();
  Matrix c(p, q);
  const double* pa = a.data();
  const double* pb = b.data();
  double* pc = c.data();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < p; ++i) {
    double* ci = pc + static_cast<std::size_t>(i) * q;
    for (int r = 0; r < n; ++r) {
      const double ari = pa[static_cast<std::size_t>(r) * p + i];
      const double* br = pb + static_cast<std::size_t>(r) * q;
#pragma omp simd
      for (int j = 0; j < q; ++j) ci[j] += ari * br[j];
    }
  }
  return c;
}

Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
  check_inner(a.cols(), b.cols(), "matmul_a_bt");
  const int m = a.rows(), kk = a.cols(), n = b.rows();
  Matrix c(m, n);
  const double* pa = a.data();
  const double* pb = b.data();
  double* pc = c.data();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    const double* ai = pa + static_cast<std::size_t>(i) * kk;
    double* ci = pc + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      const double* bj = pb + static_cast<std::size_t>(j) * kk;
      double s = 0.0;
#pragma omp simd reduction(+ : s)
      for (int k = 0; k < kk; ++k) s += ai[k] * bj[k];
      ci[j] = s;
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

namespace {

Matrix softmax_rows_unit(const Matrix& z) {
  Matrix out(z.rows(), z.cols());
  const int n = z.rows(), L = z.cols();
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n; ++r) {
    const double* zr = z.data() + static_cast<std::size_t>(r) * L;
    double* or_ = out.data() + static_cast<std::size_t>(r) * L;
    double mx = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < L; ++j) mx = std::max(mx, zr[j]);
    double sum = 0.0;
    for (int j = 0; j < L; ++j) {
      or_[j] = std::exp(zr[j] - mx);
      sum += or_[j];
    }
    const double inv = 1.0 / sum;
    for (int j = 0; j < L; ++j) or_[j] *= inv;
  }
  return out;
}

}  // namespace

Matrix softmax_rows(const Matrix& z, double temperature) {
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("softmax_rows: temperature must be positive");
  }
  if (temperature == 1.0) return softmax_rows_unit(z);
  // Materialize temperature * z so softmax_rows(z, T) and
  // softmax_rows(T * z, 1) run the identical code path on identical bits.
  Matrix scaled(z.rows(), z.cols());
  for (std::size_t i = 0; i < z.size(); ++i) scaled.data()[i] = temperature * z.data()[i];
  return softmax_rows_unit(scaled);
}

Matrix logistic(const Matrix& z) {
  Matrix out(z.rows(), z.cols());
  const std::size_t total = z.size();
  const double* pz = z.data();
  double* po = out.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(total); ++i) {
    po[i] = 1.0 / (1.0 + std::exp(-pz[i]));
  }
  return out;
}

Matrix relu(const Matrix& z) {
  Matrix out(z.rows(), z.cols());
  const std::size_t total = z.size();
  const double* pz = z.data();
  double* po = out.data();
#pragma omp parallel for simd schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(total); ++i) {
    po[i] = pz[i] > 0.0 ? pz[i] : 0.0;
  }
  return out;
}

Matrix relu_backward(const Matrix& da, const Matrix& z) {
  if (!da.same_shape(z)) throw std::invalid_argument("relu_backward: shape mismatch");
  Matrix out(z.rows(), z.cols());
  const std::size_t total = z.size();
  const double* pa = da.data();
  const double* pz = z.data();
  double* po = out.data();
#pragma omp parallel for simd schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(total); ++i) {
    po[i] = pz[i] > 0.0 ? pa[i] : 0.0;
  }
  return out;
}

void add_row_vector(Matrix& m, std::span<const double> v) {
  if (static_cast<int>(v.size()) != m.cols()) {
    throw std::invalid_argument("add_row_vector: length mismatch");
  }
  const int n = m.rows(), L = m.cols();
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n; ++r) {
    double* mr = m.data() + static_cast<std::size_t>(r) * L;
#pragma omp simd
    for (int j = 0; j < L; ++j) mr[j] += v[j];
  }
}

std::vector<double> column_sums(const Matrix& m) {
  std::vector<double> s(m.cols(), 0.0);
  for (int r = 0; r < m.rows(); ++r) {
    const double* mr = m.data() + static_cast<std::size_t>(r) * m.cols();
    for (int j = 0; j < m.cols(); ++j) s[j] += mr[j];
  }
  return s;
}

void axpy(double alpha, const Matrix& x, Matrix& y) {
  if (!x.same_shape(y)) throw std::invalid_argument("axpy: shape mismatch");
  const std::size_t total = x.size();
  const double* px = x.data();
  double* py = y.data();
#pragma omp parallel for simd schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(total); ++i) {
    py[i] += alpha * px[i];
  }
}

}  // namespace bootnet
