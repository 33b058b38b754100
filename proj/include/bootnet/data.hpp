#ifndef BOOTNET_DATA_HPP_
#define BOOTNET_DATA_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bootnet/matrix.hpp"

namespace bootnet {

enum class DatasetMode { multiclass, multibox };

struct Dataset {
  Matrix features;  // n x D, entries in [0, 1]
  Matrix labels;    // one-hot rows (multiclass) or binary targets (multibox)
  DatasetMode mode = DatasetMode::multiclass;
  std::string name;
  std::string provenance;

  int size() const { return features.rows(); }
  int feature_dim() const { return features.cols(); }
  int num_classes() const { return labels.cols(); }

  /// First `count` examples (no reshuffle).
  Dataset take(int count) const;
};

/// Malformed IDX input; carries the byte offset where parsing failed.
class IdxParseError : public std::runtime_error {
 public:
  IdxParseError(const std::string& message, std::size_t byte_offset);
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

/// Parses the big-endian IDX pair (magic 0x00000803 images, 0x00000801
/// labels). Pixels are scaled to [0,1] by division by 255; labels become
/// one-hot rows over 10 classes. Any structural problem raises IdxParseError
/// and no partial Dataset escapes.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

/// Inverse of load_idx for round-trip tests and for materializing generated
/// corpora on disk. Features must be exact multiples of 1/255.
void write_idx(const Dataset& data, int image_rows, int image_cols,
               const std::string& images_path, const std::string& labels_path);

/// Procedural 28x28 digit corpus: dot-matrix glyphs under random shift,
/// rotation, intensity jitter and pixel noise. Pixels are quantized to
/// 1/255 steps so the corpus round-trips through IDX exactly. Used as the
/// stand-in when real MNIST files are not on disk.
Dataset synth_digits(int num_examples, std::uint64_t seed);

/// Generator for desk-scale detection targets: L location priors, of which
/// a random subset is active per instance.
struct SynthDetectionSpec {
  int num_priors = 16;      // L
  int feature_dim = 32;     // D, must be >= L
  int num_instances = 2000;
  double mean_objects = 2.0;     // Poisson mean, truncated to [0, L]
  double signal_strength = 3.0;  // per-active-prior signature scale
  double clutter_sigma = 1.0;    // isotropic Gaussian clutter
  std::uint64_t seed = 1;
};

struct SynthDetection {
  Dataset data;       // features squashed to [0,1]; labels = complete targets
  Matrix signatures;  // L x D orthonormal prior signatures
  Matrix bayes_scores;  // n x L, signature projection of the raw features
  SynthDetectionSpec spec;
};

/// Raw features are sum(signal_strength * signature_k for active k) plus
/// N(0, clutter_sigma^2) clutter, then squashed elementwise by the logistic
/// so stored features sit in [0,1]. The squash is invertible, so the
/// projection scores in bayes_scores are exact sufficient statistics for
/// the per-prior Bayes posterior.
SynthDetection synth_detection(const SynthDetectionSpec& spec);

struct SplitResult {
  Dataset train;
  Dataset validation;
  Dataset test;
};

/// Disjoint seeded split; stratified per class in multiclass mode. The
/// fractions must sum to 1.
SplitResult split(const Dataset& data, double train_frac, double val_frac,
                  double test_frac, std::uint64_t seed);

/// Plain comma-separated dump, one matrix row per line, %.9g entries.
void write_matrix_csv(const Matrix& m, const std::string& path);

struct DigitsBundle {
  Dataset train;
  Dataset test;
  std::string source;  // "mnist" or "synth-digits"
};

/// Loads the canonical MNIST IDX quartet (train-images-idx3-ubyte etc., also
/// the dotted spellings) from dir; nullopt when any file is missing.
std::optional<DigitsBundle> try_load_mnist_dir(const std::string& dir);

/// Real MNIST when mnist_dir (or $MNIST_DIR when mnist_dir is empty) holds
/// the IDX files; otherwise the procedural digit corpus, materialized to IDX
/// under scratch_dir and read back through load_idx so the exercised code
/// path is the same either way.
DigitsBundle load_digits_corpus(const std::string& mnist_dir, int synth_train,
                                int synth_test, std::uint64_t seed,
                                const std::string& scratch_dir);

}  // namespace bootnet

#endif  // BOOTNET_DATA_HPP_
