#include "bootnet/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bootnet {

Matrix finite_diff_grad(const std::function<double(const Matrix&)>& f,
                        const Matrix& x, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("finite_diff_grad: eps must be positive");
  Matrix g(x.rows(), x.cols());
  Matrix probe = x;
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) {
      const double orig = probe(i, j);
      probe(i, j) = orig + eps;
      const double fp = f(probe);
      probe(i, j) = orig - eps;
      const double fm = f(probe);
      probe(i, j) = orig;
      g(i, j) = (fp - fm) / (2.0 * eps);
    }
  }
  return g;
}

double gradient_rel_error(const Matrix& analytic, const Matrix& numeric) {
  if (!analytic.same_shape(numeric)) {
    throw std::invalid_argument("gradient_rel_error: shape mismatch");
  }
  double max_diff = 0.0;
  double scale = 0.0;
  for (int i = 0; i < analytic.rows(); ++i) {
    for (int j = 0; j < analytic.cols(); ++j) {
      max_diff = std::max(max_diff, std::fabs(analytic(i, j) - numeric(i, j)));
      scale = std::max({scale, std::fabs(analytic(i, j)), std::fabs(numeric(i, j))});
    }
  }
  return max_diff / std::max(scale, 1e-12);
}

}  // namespace bootnet
