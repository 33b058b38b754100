#ifndef BOOTNET_TRAIN_HPP_
#define BOOTNET_TRAIN_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bootnet/data.hpp"
#include "bootnet/losses.hpp"
#include "bootnet/mlp.hpp"
#include "bootnet/noise.hpp"

namespace bootnet {

/// One training run: dims, objective, corruption process, optimizer knobs.
/// lr / batch_size / epoch counts are implementation defaults, not reported
/// values.
struct TrainConfig {
  std::vector<int> dims;
  LossSpec loss;
  NoiseSpec noise;
  double lr = 0.01;
  int batch_size = 100;
  int epochs_pretrain = 20;
  int epochs_finetune = 30;
  double weight_decay = 0.0001;
  std::uint64_t seed = 1;
  /// Per-epoch evaluation uses the first eval_subset test examples
  /// (0 = the whole test set). The final metric always uses the whole set.
  int eval_subset = 0;
};

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double test_metric = 0.0;  // accuracy (multiclass) or AP (multibox)
  double corrupted_fraction = 0.0;
  double wall_ms = 0.0;  // informational; excluded from determinism checks
};

/// Serializable record of one run. payload_checksum covers config and all
/// deterministic metrics; wall-clock fields are excluded.
struct RunRecord {
  TrainConfig config;
  std::vector<EpochMetrics> epochs;
  double final_test_metric = 0.0;
  double final_train_loss = 0.0;
  double corrupted_fraction = 0.0;
  double wall_ms_total = 0.0;
  std::uint64_t payload_checksum = 0;
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& message, int epoch, int batch);
  int epoch() const { return epoch_; }
  int batch() const { return batch_; }

 private:
  int epoch_;
  int batch_;
};

struct TrainOutput {
  MlpParams params;
  std::optional<NoiseAdapter> adapter;  // present for noise_marginal / recon runs
  std::optional<ReconHead> recon;       // present for recon runs
  RunRecord record;
};

/// Two-phase protocol: epochs_pretrain of prediction-only baseline training,
/// then epochs_finetune of config.loss, warm-starting from the baseline
/// weights. Auxiliary heads appear at the phase switch: a NoiseAdapter
/// initialized to the identity and, for recon runs, a small-Gaussian
/// ReconHead. Corruption is applied to the training labels once, up front;
/// evaluation always uses the clean test labels. Fully deterministic per
/// seed, including mini-batch shuffling.
TrainOutput train(const TrainConfig& config, const Dataset& train_data,
                  const Dataset& test_data);

/// train() continued from explicit warm-start weights, running only the
/// fine-tune phase; epoch numbering and shuffle streams continue from
/// epochs_pretrain, so composing this with a pretrain-only run reproduces
/// a full train() byte for byte.
TrainOutput finetune_from(const MlpParams& warm_start, const TrainConfig& config,
                          const Dataset& train_data, const Dataset& test_data);

void fill_checksum(RunRecord& record);

/// JSON (config + metrics + checksum) next to a CSV metric table with
/// columns epoch,train_loss,test_accuracy,corrupted_fraction,wall_ms.
void save_run(const RunRecord& record, const std::string& json_path,
              const std::string& csv_path);

/// Verifies the stored checksum; tampering raises IntegrityError.
RunRecord load_run(const std::string& json_path);

class IntegrityError : public std::runtime_error {
 public:
  explicit IntegrityError(const std::string& message) : std::runtime_error(message) {}
};

struct SweepCell {
  double level = 0.0;
  LossKind loss = LossKind::ce_baseline;
  double final_test_accuracy = 0.0;
  double final_train_loss = 0.0;
  std::optional<Matrix> adapter_channel;  // recon runs only
};

struct SweepOutcome {
  std::vector<SweepCell> cells;  // ordered by (level, loss)
  std::vector<int> permutation;  // the injected corruption map
  std::string csv_path;
};

/// Fixed-permutation corruption sweep: for every level and each of
/// {baseline, bootstrap_recon, bootstrap_hard, bootstrap_soft}, fine-tunes
/// from a shared per-level baseline model and records final clean-label test
/// accuracy. Writes <out_dir>/sweep.csv plus per-run JSON/CSV records and an
/// adapter-channel dump per recon run. A cell whose training diverges is
/// recorded as failed instead of aborting the sweep.
SweepOutcome run_noise_sweep(const TrainConfig& base,
                             const std::vector<double>& levels,
                             const Dataset& train_data, const Dataset& test_data,
                             const std::string& out_dir);

struct MultiboxExperimentConfig {
  SynthDetectionSpec spec;
  double drop_prob = 0.3;
  double beta_hard = 0.8;
  double beta_soft = 0.95;
  int k_drop = 4;
  TrainConfig base;  // dims/lr/batch/epochs/seed; loss and noise are set per method
};

struct MultiboxRow {
  std::string method;
  double ap = 0.0;
  double recall_at_60p = 0.0;
};

struct MultiboxOutcome {
  std::vector<MultiboxRow> rows;  // baseline, multibox_hard, multibox_soft, multibox_topk
  double drop_prob = 0.0;
};

/// Trains the four MultiBox objectives on identically dropped annotations
/// (shared pretrain, same seeds) and evaluates AP / recall@60p against the
/// complete held-out ground truth. Writes multibox.csv and one PR-curve CSV
/// per method into out_dir.
MultiboxOutcome run_multibox_experiment(const MultiboxExperimentConfig& config,
                                        const std::string& out_dir);

}  // namespace bootnet

#endif  // BOOTNET_TRAIN_HPP_
