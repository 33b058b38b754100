#ifndef BOOTNET_GRADCHECK_HPP_
#define BOOTNET_GRADCHECK_HPP_

#include <functional>
#include <string>
#include <vector>

#include "bootnet/matrix.hpp"

namespace bootnet {

/// Central-difference gradient of a scalar function of a matrix:
/// (f(x + eps*e_i) - f(x - eps*e_i)) / (2*eps) per entry. This is the
/// ground-truth oracle every analytic gradient in the project is checked
/// against.
Matrix finite_diff_grad(const std::function<double(const Matrix&)>& f,
                        const Matrix& x, double eps = 1e-5);

/// max |a - b| scaled by the largest gradient entry (floored to avoid
/// division blowups on all-zero gradients).
double gradient_rel_error(const Matrix& analytic, const Matrix& numeric);

struct GradCheckReport {
  std::string name;
  double max_rel_error = 0.0;
  int instances = 0;
};

/// Finite-difference sweep over the whole loss zoo: random small instances
/// per loss, analytic dlogits (plus adapter / reconstruction-head gradients
/// where the loss has them) against finite_diff_grad. Bootstrap targets are
/// frozen at the evaluation point, matching the per-batch constant-target
/// rule the losses implement.
std::vector<GradCheckReport> run_gradcheck_suite(int instances_per_loss,
                                                 std::uint64_t seed);

}  // namespace bootnet

#endif  // BOOTNET_GRADCHECK_HPP_
