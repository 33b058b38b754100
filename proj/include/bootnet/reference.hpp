#ifndef BOOTNET_REFERENCE_HPP_
#define BOOTNET_REFERENCE_HPP_

#include "bootnet/matrix.hpp"

namespace bootnet::reference {

// Serial, obviously-correct versions of the hot kernels. These are the
// ground truth the parallel kernels are tested against and the baseline
// the benchmark tool compares to. Not used on the training path.

/// Naive triple-loop product.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix softmax_rows(const Matrix& z, double temperature = 1.0);

}  // namespace bootnet::reference

#endif  // BOOTNET_REFERENCE_HPP_
