#include "bootnet/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bootnet/rng.hpp"

namespace bootnet {

std::string noise_mode_name(NoiseMode mode) {
  switch (mode) {
    case NoiseMode::permutation: return "permutation";
    case NoiseMode::confusion: return "confusion";
    case NoiseMode::annotation_drop: return "annotation_drop";
  }
  throw std::invalid_argument("noise_mode_name: unknown mode");
}

NoiseMode noise_mode_from_name(const std::string& name) {
  if (name == "permutation") return NoiseMode::permutation;
  if (name == "confusion") return NoiseMode::confusion;
  if (name == "annotation_drop") return NoiseMode::annotation_drop;
  throw std::invalid_argument("unknown noise mode: " + name);
}

void check_one_hot(const Matrix& labels, const char* what) {
  for (int r = 0; r < labels.rows(); ++r) {
    int ones = 0;
    for (int k = 0; k < labels.cols(); ++k) {
      const double v = labels(r, k);
      if (v == 1.0) {
        ++ones;
      } else if (v != 0.0) {
        throw std::invalid_argument(std::string(what) + ": row " + std::to_string(r) +
                                    " is not one-hot");
      }
    }
    if (ones != 1) {
      throw std::invalid_argument(std::string(what) + ": row " + std::to_string(r) +
                                  " is not one-hot");
    }
  }
}

std::vector<int> make_permutation(int num_classes, std::uint64_t seed) {
  if (num_classes < 2) {
    throw std::invalid_argument("make_permutation: need at least 2 classes");
  }
  Rng rng(seed);
  // Rejection from uniform permutations, conditioned on no fixed point,
  // stays uniform over derangements. Acceptance rate tends to 1/e.
  for (;;) {
    std::vector<int> p = rng.permutation(num_classes);
    bool fixed_point = false;
    for (int i = 0; i < num_classes; ++i) {
      if (p[i] == i) {
        fixed_point = true;
        break;
      }
    }
    if (!fixed_point) return p;
  }
}

namespace {

int one_hot_index(const Matrix& labels, int r) {
  for (int k = 0; k < labels.cols(); ++k) {
    if (labels(r, k) == 1.0) return k;
  }
  return -1;
}

void validate_permutation(const std::vector<int>& p, int L) {
  if (static_cast<int>(p.size()) != L) {
    throw std::invalid_argument("corrupt_labels: permutation length does not match class count");
  }
  std::vector<char> seen(L, 0);
  for (int v : p) {
    if (v < 0 || v >= L || seen[v]) {
      throw std::invalid_argument("corrupt_labels: permutation is not a bijection");
    }
    seen[v] = 1;
  }
}

void validate_confusion(const Matrix& confusion, int L) {
  if (confusion.rows() != L || confusion.cols() != L) {
    throw std::invalid_argument("corrupt_labels: confusion matrix must be L x L");
  }
  for (int r = 0; r < L; ++r) {
    double sum = 0.0;
    for (int c = 0; c < L; ++c) {
      if (confusion(r, c) < 0.0) {
        throw std::invalid_argument("corrupt_labels: confusion entries must be nonnegative");
      }
      sum += confusion(r, c);
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("corrupt_labels: confusion rows must sum to 1");
    }
  }
}

}  // namespace

CorruptionResult corrupt_labels(const Matrix& onehot_labels, const NoiseSpec& spec) {
  if (spec.mode != NoiseMode::permutation && spec.mode != NoiseMode::confusion) {
    throw std::invalid_argument("corrupt_labels: spec.mode must be permutation or confusion");
  }
  check_one_hot(onehot_labels, "corrupt_labels");
  const int n = onehot_labels.rows();
  const int L = onehot_labels.cols();
  if (spec.mode == NoiseMode::permutation) {
    if (!(spec.corrupt_prob >= 0.0 && spec.corrupt_prob <= 1.0)) {
      throw std::invalid_argument("corrupt_labels: corrupt_prob must be in [0, 1]");
    }
    validate_permutation(spec.permutation, L);
  } else {
    validate_confusion(spec.confusion, L);
  }

  CorruptionResult res;
  res.labels = onehot_labels;
  res.mask.assign(n, 0);
  Rng rng(spec.seed);
  int altered = 0;
  for (int r = 0; r < n; ++r) {
    const int original = one_hot_index(onehot_labels, r);
    int observed = original;
    if (spec.mode == NoiseMode::permutation) {
      if (rng.next_uniform() < spec.corrupt_prob) observed = spec.permutation[original];
    } else {
      // Inverse-CDF draw from the confusion row; one uniform per example.
      const double u = rng.next_uniform();
      double cum = 0.0;
      observed = L - 1;
      for (int k = 0; k < L; ++k) {
        cum += spec.confusion(original, k);
        if (u < cum) {
          observed = k;
          break;
        }
      }
    }
    if (observed != original) {
      res.labels(r, original) = 0.0;
      res.labels(r, observed) = 1.0;
      res.mask[r] = 1;
      ++altered;
    }
  }
  res.corrupted_fraction = n > 0 ? static_cast<double>(altered) / n : 0.0;
  return res;
}

DropResult drop_annotations(const Matrix& binary_targets, double drop_prob,
                            std::uint64_t seed) {
  if (!(drop_prob >= 0.0 && drop_prob <= 1.0)) {
    throw std::invalid_argument("drop_annotations: drop_prob must be in [0, 1]");
  }
  for (int r = 0; r < binary_targets.rows(); ++r) {
    for (int k = 0; k < binary_targets.cols(); ++k) {
      const double v = binary_targets(r, k);
      if (v != 0.0 && v != 1.0) {
        throw std::invalid_argument("drop_annotations: targets must be binary");
      }
    }
  }
  DropResult res;
  res.targets = binary_targets;
  res.mask = Matrix(binary_targets.rows(), binary_targets.cols());
  Rng rng(seed);
  long positives = 0, dropped = 0;
  for (int r = 0; r < binary_targets.rows(); ++r) {
    for (int k = 0; k < binary_targets.cols(); ++k) {
      if (binary_targets(r, k) != 1.0) continue;
      ++positives;
      if (rng.next_uniform() < drop_prob) {
        res.targets(r, k) = 0.0;
        res.mask(r, k) = 1.0;
        ++dropped;
      }
    }
  }
  res.dropped_fraction = positives > 0 ? static_cast<double>(dropped) / positives : 0.0;
  return res;
}

Matrix empirical_confusion(const Matrix& noisy_onehot, const Matrix& clean_onehot) {
  if (!noisy_onehot.same_shape(clean_onehot)) {
    throw std::invalid_argument("empirical_confusion: shape mismatch");
  }
  if (noisy_onehot.rows() == 0) {
    throw std::invalid_argument("empirical_confusion: empty input");
  }
  check_one_hot(noisy_onehot, "empirical_confusion(noisy)");
  check_one_hot(clean_onehot, "empirical_confusion(clean)");
  const int L = noisy_onehot.cols();
  Matrix counts(L, L);
  std::vector<double> clean_totals(L, 0.0);
  for (int r = 0; r < noisy_onehot.rows(); ++r) {
    const int obs = one_hot_index(noisy_onehot, r);
    const int clean = one_hot_index(clean_onehot, r);
    counts(obs, clean) += 1.0;
    clean_totals[clean] += 1.0;
  }
  for (int c = 0; c < L; ++c) {
    if (clean_totals[c] == 0.0) continue;  // column left all-zero
    for (int r = 0; r < L; ++r) counts(r, c) /= clean_totals[c];
  }
  return counts;
}

}  // namespace bootnet
