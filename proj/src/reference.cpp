#include "bootnet/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bootnet::reference {

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("reference::matmul: inner dimensions disagree");
  }
  Matrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (int k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  }
  return c;
}

Matrix softmax_rows(const Matrix& z, double temperature) {
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("reference::softmax_rows: temperature must be positive");
  }
  Matrix out(z.rows(), z.cols());
  for (int r = 0; r < z.rows(); ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < z.cols(); ++j) mx = std::max(mx, temperature * z(r, j));
    double sum = 0.0;
    for (int j = 0; j < z.cols(); ++j) {
      out(r, j) = std::exp(temperature * z(r, j) - mx);
      sum += out(r, j);
    }
    for (int j = 0; j < z.cols(); ++j) out(r, j) /= sum;
  }
  return out;
}

}  // namespace bootnet::reference
