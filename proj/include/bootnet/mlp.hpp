#ifndef BOOTNET_MLP_HPP_
#define BOOTNET_MLP_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "bootnet/matrix.hpp"

namespace bootnet {

/// Output nonlinearity of the final layer: row softmax for multi-class,
/// elementwise logistic for per-location confidence prediction.
enum class Head { softmax, logistic };

struct LayerParams {
  Matrix weights;            // fan_in x fan_out
  std::vector<double> bias;  // fan_out
};

/// Stack of affine+ReLU layers with a linear final layer.
struct MlpParams {
  std::vector<LayerParams> layers;
  std::vector<int> dims;  // dims[0] = input width, dims.back() = output width
  Head head = Head::softmax;
  std::uint64_t seed = 0;
};

/// Everything forward computes that backward needs, for one mini-batch.
struct ForwardTrace {
  Matrix input;
  std::vector<Matrix> pre_acts;     // z per layer (last one is the logits)
  std::vector<Matrix> activations;  // ReLU outputs per hidden layer
  Matrix probs;                     // q (softmax) or c (logistic)
  Head head = Head::softmax;
  double temperature = 1.0;

  const Matrix& logits() const { return pre_acts.back(); }
};

/// Gradients shaped like MlpParams.
struct MlpGrads {
  std::vector<LayerParams> layers;
};

/// He-style init: weights ~ N(0, 2/fan_in), biases zero. Deterministic per
/// seed.
MlpParams init_mlp(const std::vector<int>& dims, std::uint64_t seed,
                   Head head = Head::softmax);

/// Hidden layers apply ReLU; the head applies softmax_rows(logits,
/// temperature) or elementwise logistic. x must have dims[0] columns.
ForwardTrace forward(const MlpParams& params, const Matrix& x,
                     double temperature = 1.0);

/// Exact gradient of the scalar loss whose logit-space gradient is dlogits.
/// No extra batch scaling happens here; the loss bakes its 1/n into dlogits.
MlpGrads backward(const MlpParams& params, const ForwardTrace& trace,
                  const Matrix& dlogits);

/// w <- w - lr * (grad + weight_decay * w); biases are exempt from decay.
void sgd_step(MlpParams& params, const MlpGrads& grads, double lr,
              double weight_decay);

MlpGrads zero_grads_like(const MlpParams& params);

/// Versioned JSON container: dims, head, seed, layer blobs. Round-trip is
/// lossless (doubles serialized at full precision).
void save_checkpoint(const MlpParams& params, const std::string& path);
MlpParams load_checkpoint(const std::string& path);

}  // namespace bootnet

#endif  // BOOTNET_MLP_HPP_
