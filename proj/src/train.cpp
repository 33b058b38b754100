#include "bootnet/train.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "bootnet/kernels.hpp"
#include "bootnet/metrics.hpp"
#include "bootnet/rng.hpp"

namespace bootnet {

namespace {

// Derived-stream ids off the run seed.
constexpr std::uint64_t kShuffleStreamBase = 0x100;
constexpr std::uint64_t kReconInitStream = 0x20;

constexpr double kReconInitStd = 0.01;

// Operating points for the corruption sweep.
constexpr double kSweepBetaHard = 0.8;
constexpr double kSweepBetaSoft = 0.95;
constexpr double kSweepReconWeight = 0.005;

struct BatchLossResult {
  double value = 0.0;
  Matrix dlogits;
  std::optional<Matrix> d_adapter_weights;
  std::optional<std::vector<double>> d_adapter_bias;
  std::optional<Matrix> d_recon_weights;
};

Matrix gather_rows(const Matrix& src, const std::vector<int>& order, int begin, int end) {
  Matrix out(end - begin, src.cols());
  for (int i = begin; i < end; ++i) {
    const double* s = src.data() + static_cast<std::size_t>(order[i]) * src.cols();
    double* d = out.data() + static_cast<std::size_t>(i - begin) * src.cols();
    std::copy(s, s + src.cols(), d);
  }
  return out;
}

BatchLossResult eval_loss(const LossSpec& spec, const Matrix& x,
                          const ForwardTrace& trace, const Matrix& targets,
                          const NoiseAdapter* adapter, const ReconHead* recon) {
  BatchLossResult out;
  switch (spec.kind) {
    case LossKind::ce_baseline: {
      LossResult r = ce_baseline(trace.probs, targets);
      out.value = r.value;
      out.dlogits = std::move(r.dlogits);
      break;
    }
    case LossKind::bootstrap_soft: {
      LossResult r = bootstrap_soft(trace.probs, targets, spec.beta);
      out.value = r.value;
      out.dlogits = std::move(r.dlogits);
      break;
    }
    case LossKind::bootstrap_hard: {
      LossResult r = bootstrap_hard(trace.probs, targets, spec.beta);
      out.value = r.value;
      out.dlogits = std::move(r.dlogits);
      break;
    }
    case LossKind::bootstrap_temperature: {
      LossResult r = bootstrap_temperature(trace.logits(), targets, spec.beta,
                                           spec.temperature);
      out.value = r.value;
      out.dlogits = std::move(r.dlogits);
      break;
    }
    case LossKind::noise_marginal: {
      AdapterLossResult r = noise_marginal(trace.probs, targets, *adapter);
      out.value = r.value;
      out.dlogits = std::move(r.dlogits);
      out.d_adapter_weights = std::move(r.d_adapter_weights);
      out.d_adapter_bias = std::move(r.d_adapter_bias);
      break;
    }
    case LossKind::bootstrap_recon: {
      // Full consistency model: the observed label is predicted through the
      // noise channel, and the reconstruction term ties q to the input.
      AdapterLossResult marg = noise_marginal(trace.probs, targets, *adapter);
      ReconLossResult pen =
          reconstruction_penalty(x, trace.probs, *recon, spec.recon_weight);
      out.value = marg.value + pen.value;
      out.dlogits = std::move(marg.dlogits);
      axpy(1.0, pen.dlogits, out.dlogits);
      out.d_adapter_weights = std::move(marg.d_adapter_weights);
      out.d_adapter_bias = std::move(marg.d_adapter_bias);
      out.d_recon_weights = std::move(pen.d_recon_weights);
      break;
    }
    case LossKind::multibox_baseline: {
      LossResult r = multibox_baseline(trace.probs, targets);
      out.value = r.value;
      out.dlogits = std::move(r.dlogits);
      break;
    }
    case LossKind::multibox_hard: {
      LossResult r = multibox_hard(trace.probs, targets, spec.beta);
      out.value = r.value;
      out.dlogits = std::move(r.dlogits);
      break;
    }
    case LossKind::multibox_soft: {
      LossResult r = multibox_soft(trace.probs, targets, spec.beta);
      out.value = r.value;
      out.dlogits = std::move(r.dlogits);
      break;
    }
    case LossKind::multibox_topk: {
      LossResult r = multibox_topk(trace.probs, targets, spec.k_drop);
      out.value = r.value;
      out.dlogits = std::move(r.dlogits);
      break;
    }
  }
  return out;
}

void validate_config(const TrainConfig& cfg, const Dataset& train_data,
                     const Dataset& test_data) {
  if (cfg.dims.size() < 2) throw std::invalid_argument("train: dims needs input and output widths");
  if (cfg.dims.front() != train_data.feature_dim()) {
    throw std::invalid_argument("train: dims[0] does not match the feature width");
  }
  if (cfg.dims.back() != train_data.num_classes()) {
    throw std::invalid_argument("train: dims.back() does not match the label width");
  }
  if (!(cfg.lr > 0.0)) throw std::invalid_argument("train: lr must be positive");
  if (cfg.batch_size <= 0) throw std::invalid_argument("train: batch_size must be positive");
  if (cfg.epochs_pretrain < 0 || cfg.epochs_finetune < 0) {
    throw std::invalid_argument("train: epoch counts must be nonnegative");
  }
  if (cfg.weight_decay < 0.0) throw std::invalid_argument("train: weight_decay must be nonnegative");
  if (train_data.mode != test_data.mode ||
      train_data.feature_dim() != test_data.feature_dim() ||
      train_data.num_classes() != test_data.num_classes()) {
    throw std::invalid_argument("train: train/test dataset shapes disagree");
  }
  if (train_data.size() == 0 || test_data.size() == 0) {
    throw std::invalid_argument("train: empty dataset");
  }
  const bool multibox = train_data.mode == DatasetMode::multibox;
  if (multibox != is_multibox_kind(cfg.loss.kind)) {
    throw std::invalid_argument("train: loss kind is incompatible with the dataset mode");
  }
  if (multibox && cfg.noise.mode != NoiseMode::annotation_drop) {
    throw std::invalid_argument("train: multibox training expects annotation_drop noise");
  }
  if (!multibox && cfg.noise.mode == NoiseMode::annotation_drop) {
    throw std::invalid_argument("train: multiclass training expects permutation or confusion noise");
  }
}

double eval_metric(const MlpParams& params, const Dataset& data) {
  return data.mode == DatasetMode::multiclass ? evaluate_accuracy(params, data)
                                              : detection_average_precision(params, data);
}

bool needs_adapter(LossKind kind) {
  return kind == LossKind::noise_marginal || kind == LossKind::bootstrap_recon;
}

TrainOutput run_training(const TrainConfig& cfg, const Dataset& train_data,
                         const Dataset& test_data, const MlpParams* warm_start) {
  validate_config(cfg, train_data, test_data);
  const bool multibox = train_data.mode == DatasetMode::multibox;
  const int n = train_data.size();
  const int num_outputs = train_data.num_classes();

  Matrix noisy_labels = train_data.labels;
  double corrupted_fraction = 0.0;
  if (multibox) {
    DropResult dropped = drop_annotations(train_data.labels, cfg.noise.drop_prob, cfg.noise.seed);
    noisy_labels = std::move(dropped.targets);
    corrupted_fraction = dropped.dropped_fraction;
  } else if (cfg.noise.mode == NoiseMode::confusion ||
             (cfg.noise.mode == NoiseMode::permutation && cfg.noise.corrupt_prob > 0.0)) {
    CorruptionResult corrupted = corrupt_labels(train_data.labels, cfg.noise);
    noisy_labels = std::move(corrupted.labels);
    corrupted_fraction = corrupted.corrupted_fraction;
  }

  const Head head = multibox ? Head::logistic : Head::softmax;
  MlpParams params = warm_start ? *warm_start : init_mlp(cfg.dims, cfg.seed, head);
  std::optional<NoiseAdapter> adapter;
  std::optional<ReconHead> recon;

  const Rng stream_root(cfg.seed);
  const int total_epochs = cfg.epochs_pretrain + cfg.epochs_finetune;
  const int first_epoch = warm_start ? cfg.epochs_pretrain : 0;

  const Dataset eval_set = (cfg.eval_subset > 0 && cfg.eval_subset < test_data.size())
                               ? test_data.take(cfg.eval_subset)
                               : test_data;

  RunRecord record;
  record.config = cfg;
  record.corrupted_fraction = corrupted_fraction;

  const LossSpec baseline_spec{multibox ? LossKind::multibox_baseline : LossKind::ce_baseline};

  const auto run_start = std::chrono::steady_clock::now();
  for (int epoch = first_epoch; epoch < total_epochs; ++epoch) {
    const bool pretrain_phase = epoch < cfg.epochs_pretrain;
    const LossSpec& active = pretrain_phase ? baseline_spec : cfg.loss;
    if (!pretrain_phase) {
      if (needs_adapter(cfg.loss.kind) && !adapter) {
        adapter = NoiseAdapter::identity(num_outputs);
      }
      if (cfg.loss.kind == LossKind::bootstrap_recon && !recon) {
        Rng init_rng = stream_root.derive(kReconInitStream);
        ReconHead head_init;
        head_init.weights = Matrix(train_data.feature_dim(), num_outputs);
        for (std::size_t i = 0; i < head_init.weights.size(); ++i) {
          head_init.weights.data()[i] = init_rng.next_gaussian(kReconInitStd);
        }
        recon = std::move(head_init);
      }
    }

    const auto epoch_start = std::chrono::steady_clock::now();
    Rng shuffle = stream_root.derive(kShuffleStreamBase + static_cast<std::uint64_t>(epoch));
    const std::vector<int> order = shuffle.permutation(n);

    double loss_sum = 0.0;
    int batch_index = 0;
    for (int begin = 0; begin < n; begin += cfg.batch_size, ++batch_index) {
      const int end = std::min(n, begin + cfg.batch_size);
      const Matrix xb = gather_rows(train_data.features, order, begin, end);
      const Matrix tb = gather_rows(noisy_labels, order, begin, end);
      const ForwardTrace trace = forward(params, xb);
      BatchLossResult batch = eval_loss(active, xb, trace, tb,
                                        adapter ? &*adapter : nullptr,
                                        recon ? &*recon : nullptr);
      if (!std::isfinite(batch.value)) {
        throw TrainingError("training diverged (non-finite loss)", epoch, batch_index);
      }
      loss_sum += batch.value * (end - begin);

      const MlpGrads grads = backward(params, trace, batch.dlogits);
      sgd_step(params, grads, cfg.lr, cfg.weight_decay);
      if (batch.d_adapter_weights) {
        Matrix& w = adapter->weights;
        const Matrix& g = *batch.d_adapter_weights;
        for (std::size_t i = 0; i < w.size(); ++i) {
          w.data()[i] -= cfg.lr * (g.data()[i] + cfg.weight_decay * w.data()[i]);
        }
        for (std::size_t i = 0; i < adapter->bias.size(); ++i) {
          adapter->bias[i] -= cfg.lr * (*batch.d_adapter_bias)[i];
        }
      }
      if (batch.d_recon_weights) {
        Matrix& w = recon->weights;
        const Matrix& g = *batch.d_recon_weights;
        for (std::size_t i = 0; i < w.size(); ++i) {
          w.data()[i] -= cfg.lr * (g.data()[i] + cfg.weight_decay * w.data()[i]);
        }
      }
    }

    EpochMetrics metrics;
    metrics.epoch = epoch + 1;
    metrics.train_loss = loss_sum / n;
    metrics.test_metric = eval_metric(params, eval_set);
    metrics.corrupted_fraction = corrupted_fraction;
    metrics.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - epoch_start)
                          .count();
    record.epochs.push_back(metrics);
  }

  record.final_test_metric = eval_metric(params, test_data);
  record.final_train_loss = record.epochs.empty() ? 0.0 : record.epochs.back().train_loss;
  record.wall_ms_total = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - run_start)
                             .count();
  fill_checksum(record);

  TrainOutput out;
  out.params = std::move(params);
  out.adapter = std::move(adapter);
  out.recon = std::move(recon);
  out.record = std::move(record);
  return out;
}

void write_pr_csv(const PrCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "threshold,precision,recall\n";
  char line[128];
  for (const auto& p : curve) {
    std::snprintf(line, sizeof(line), "%.9g,%.9g,%.9g\n", p.threshold, p.precision, p.recall);
    out << line;
  }
}

}  // namespace

TrainingError::TrainingError(const std::string& message, int epoch, int batch)
    : std::runtime_error(message + " at epoch " + std::to_string(epoch) + ", batch " +
                         std::to_string(batch)),
      epoch_(epoch),
      batch_(batch) {}

TrainOutput train(const TrainConfig& config, const Dataset& train_data,
                  const Dataset& test_data) {
  return run_training(config, train_data, test_data, nullptr);
}

TrainOutput finetune_from(const MlpParams& warm_start, const TrainConfig& config,
                          const Dataset& train_data, const Dataset& test_data) {
  return run_training(config, train_data, test_data, &warm_start);
}

SweepOutcome run_noise_sweep(const TrainConfig& base,
                             const std::vector<double>& levels,
                             const Dataset& train_data, const Dataset& test_data,
                             const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const int num_classes = train_data.num_classes();

  SweepOutcome outcome;
  outcome.permutation = base.noise.permutation.empty()
                            ? make_permutation(num_classes, base.noise.seed)
                            : base.noise.permutation;

  const LossKind sweep_losses[] = {LossKind::ce_baseline, LossKind::bootstrap_recon,
                                   LossKind::bootstrap_hard, LossKind::bootstrap_soft};

  std::ofstream csv(out_dir + "/sweep.csv");
  if (!csv) throw std::runtime_error("run_noise_sweep: cannot open " + out_dir + "/sweep.csv");
  csv << "level,loss,final_test_accuracy,final_train_loss,status\n";
  char line[256];

  for (const double level : levels) {
    TrainConfig cfg = base;
    cfg.noise.mode = NoiseMode::permutation;
    cfg.noise.permutation = outcome.permutation;
    cfg.noise.corrupt_prob = level;

    // One baseline pretraining per level; every objective fine-tunes from it.
    TrainConfig pre_cfg = cfg;
    pre_cfg.loss = LossSpec{LossKind::ce_baseline};
    pre_cfg.epochs_finetune = 0;
    const TrainOutput pretrained = train(pre_cfg, train_data, test_data);

    for (const LossKind kind : sweep_losses) {
      TrainConfig cell_cfg = cfg;
      cell_cfg.loss.kind = kind;
      switch (kind) {
        case LossKind::ce_baseline:
          break;
        case LossKind::bootstrap_hard:
          cell_cfg.loss.beta = kSweepBetaHard;
          break;
        case LossKind::bootstrap_soft:
          cell_cfg.loss.beta = kSweepBetaSoft;
          break;
        case LossKind::bootstrap_recon:
          cell_cfg.loss.recon_weight = kSweepReconWeight;
          break;
        default:
          break;
      }

      SweepCell cell;
      cell.level = level;
      cell.loss = kind;
      std::string status = "ok";
      try {
        TrainOutput out = finetune_from(pretrained.params, cell_cfg, train_data, test_data);
        cell.final_test_accuracy = out.record.final_test_metric;
        cell.final_train_loss = out.record.final_train_loss;
        if (out.adapter) cell.adapter_channel = adapter_channel(*out.adapter);

        RunRecord full = out.record;
        full.epochs.insert(full.epochs.begin(), pretrained.record.epochs.begin(),
                           pretrained.record.epochs.end());
        fill_checksum(full);
        std::snprintf(line, sizeof(line), "%s/run_%.2f_%s", out_dir.c_str(), level,
                      loss_kind_name(kind).c_str());
        save_run(full, std::string(line) + ".json", std::string(line) + ".csv");
        if (cell.adapter_channel) {
          std::snprintf(line, sizeof(line), "%s/adapter_channel_%.2f.csv", out_dir.c_str(),
                        level);
          write_matrix_csv(*cell.adapter_channel, line);
        }
      } catch (const TrainingError&) {
        status = "failed";
        cell.final_test_accuracy = 0.0;
        cell.final_train_loss = 0.0;
      }

      std::snprintf(line, sizeof(line), "%.2f,%s,%.6f,%.9g,%s\n", level,
                    loss_kind_name(kind).c_str(), cell.final_test_accuracy,
                    cell.final_train_loss, status.c_str());
      csv << line;
      outcome.cells.push_back(std::move(cell));
    }
  }
  outcome.csv_path = out_dir + "/sweep.csv";
  return outcome;
}

MultiboxOutcome run_multibox_experiment(const MultiboxExperimentConfig& config,
                                        const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  const SynthDetection synth = synth_detection(config.spec);
  const SplitResult splits = split(synth.data, 0.5, 0.0, 0.5, config.spec.seed ^ 0x51u);

  TrainConfig cfg = config.base;
  cfg.noise.mode = NoiseMode::annotation_drop;
  cfg.noise.drop_prob = config.drop_prob;

  TrainConfig pre_cfg = cfg;
  pre_cfg.loss = LossSpec{LossKind::multibox_baseline};
  pre_cfg.epochs_finetune = 0;
  const TrainOutput pretrained = train(pre_cfg, splits.train, splits.test);

  struct Method {
    const char* name;
    LossSpec spec;
  };
  const Method methods[] = {
      {"baseline", LossSpec{LossKind::multibox_baseline}},
      {"multibox_hard", LossSpec{LossKind::multibox_hard, config.beta_hard}},
      {"multibox_soft", LossSpec{LossKind::multibox_soft, config.beta_soft}},
      {"multibox_topk",
       LossSpec{LossKind::multibox_topk, 1.0, 1.0, config.k_drop}},
  };

  MultiboxOutcome outcome;
  outcome.drop_prob = config.drop_prob;

  std::ofstream csv(out_dir + "/multibox.csv");
  if (!csv) throw std::runtime_error("run_multibox_experiment: cannot open " + out_dir + "/multibox.csv");
  csv << "method,ap,recall_at_60p\n";
  char line[256];

  for (const Method& method : methods) {
    TrainConfig cell_cfg = cfg;
    cell_cfg.loss = method.spec;
    const TrainOutput out = finetune_from(pretrained.params, cell_cfg, splits.train, splits.test);

    const PrCurve curve = detection_pr_curve(out.params, splits.test);
    MultiboxRow row;
    row.method = method.name;
    row.ap = average_precision(curve);
    row.recall_at_60p = recall_at_precision(curve, 0.6);
    std::snprintf(line, sizeof(line), "%s,%.6f,%.6f\n", row.method.c_str(), row.ap,
                  row.recall_at_60p);
    csv << line;
    write_pr_csv(curve, out_dir + "/pr_" + method.name + ".csv");

    RunRecord full = out.record;
    full.epochs.insert(full.epochs.begin(), pretrained.record.epochs.begin(),
                       pretrained.record.epochs.end());
    fill_checksum(full);
    save_run(full, out_dir + "/run_" + method.name + ".json",
             out_dir + "/run_" + method.name + ".csv");

    outcome.rows.push_back(std::move(row));
  }
  return outcome;
}

}  // namespace bootnet
