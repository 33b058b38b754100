#ifndef BOOTNET_NOISE_HPP_
#define BOOTNET_NOISE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "bootnet/matrix.hpp"

namespace bootnet {

enum class NoiseMode { permutation, confusion, annotation_drop };

std::string noise_mode_name(NoiseMode mode);
NoiseMode noise_mode_from_name(const std::string& name);

/// Description of a label-corruption process. Corruption is applied once,
/// before training, producing a static noisy dataset.
struct NoiseSpec {
  NoiseMode mode = NoiseMode::permutation;
  std::vector<int> permutation;  // bijection on classes (permutation mode)
  double corrupt_prob = 0.0;     // per-example probability (permutation mode)
  Matrix confusion;              // L x L row-stochastic (confusion mode)
  double drop_prob = 0.0;        // per-positive probability (annotation_drop)
  std::uint64_t seed = 0;
};

/// Uniformly random derangement (a permutation with no fixed points) of
/// 0..num_classes-1, deterministic per seed. A fixed point would silently
/// lower the effective corruption rate below corrupt_prob.
std::vector<int> make_permutation(int num_classes, std::uint64_t seed);

struct CorruptionResult {
  Matrix labels;                   // one-hot, same shape as the input
  std::vector<std::uint8_t> mask;  // 1 where the example was altered
  double corrupted_fraction = 0.0;
};

/// Each example is independently corrupted with probability corrupt_prob
/// (permutation mode) or resampled from its confusion row (confusion mode).
/// Pure function of (labels, spec.seed).
CorruptionResult corrupt_labels(const Matrix& onehot_labels, const NoiseSpec& spec);

struct DropResult {
  Matrix targets;  // binary, positives zeroed where dropped
  Matrix mask;     // 1 where a positive was dropped
  double dropped_fraction = 0.0;  // of the positives
};

/// Each positive entry is independently zeroed with probability drop_prob;
/// negatives are untouched. Deterministic per seed.
DropResult drop_annotations(const Matrix& binary_targets, double drop_prob,
                            std::uint64_t seed);

/// Entry (r, c) = fraction of clean-class-c examples observed as class r;
/// columns sum to 1. Inputs are one-hot row matrices of equal shape.
Matrix empirical_confusion(const Matrix& noisy_onehot, const Matrix& clean_onehot);

/// Throws std::invalid_argument unless every row is exactly one-hot.
void check_one_hot(const Matrix& labels, const char* what);

}  // namespace bootnet

#endif  // BOOTNET_NOISE_HPP_
