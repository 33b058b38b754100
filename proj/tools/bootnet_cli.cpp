// Command-line front end: train / sweep / multibox / gradcheck / inspect.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bootnet/data.hpp"
#include "bootnet/gradcheck.hpp"
#include "bootnet/train.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace bootnet;

namespace {

std::string default_out_dir() {
  if (const char* env = std::getenv("BOOTNET_OUT")) return env;
  return "bootnet_out";
}

struct DataOpts {
  std::string data_dir;
  int synth_train = 10000;
  int synth_test = 2000;
  std::uint64_t synth_seed = 7;
  int train_subset = 0;
};

struct ConfigOpts {
  TrainConfig cfg;
  std::string loss_name = "ce_baseline";
  std::string config_path;
};

void add_data_flags(CLI::App* app, DataOpts& opts) {
  app->add_option("--data-dir", opts.data_dir,
                  "directory with MNIST IDX files (falls back to $MNIST_DIR, then to the "
                  "generated digit corpus)");
  app->add_option("--synth-train", opts.synth_train, "generated corpus: training examples");
  app->add_option("--synth-test", opts.synth_test, "generated corpus: test examples");
  app->add_option("--synth-seed", opts.synth_seed, "generated corpus seed");
  app->add_option("--train-subset", opts.train_subset,
                  "use only the first K training examples (0 = all)");
}

void add_config_flags(CLI::App* app, ConfigOpts& opts) {
  app->add_option("--dims", opts.cfg.dims, "layer widths")->delimiter(',');
  app->add_option("--loss", opts.loss_name, "training objective");
  app->add_option("--beta", opts.cfg.loss.beta, "bootstrap beta");
  app->add_option("--temperature", opts.cfg.loss.temperature, "target softmax temperature");
  app->add_option("--k-drop", opts.cfg.loss.k_drop, "top-K locations dropped from the loss");
  app->add_option("--recon-weight", opts.cfg.loss.recon_weight, "reconstruction term weight");
  app->add_option("--lr", opts.cfg.lr, "learning rate");
  app->add_option("--batch-size", opts.cfg.batch_size, "mini-batch size");
  app->add_option("--epochs-pretrain", opts.cfg.epochs_pretrain, "baseline pretraining epochs");
  app->add_option("--epochs-finetune", opts.cfg.epochs_finetune, "fine-tuning epochs");
  app->add_option("--weight-decay", opts.cfg.weight_decay, "L2 weight decay");
  app->add_option("--seed", opts.cfg.seed, "run seed");
  app->add_option("--eval-subset", opts.cfg.eval_subset,
                  "per-epoch eval on the first K test examples (0 = all)");
  app->add_option("--noise-level", opts.cfg.noise.corrupt_prob,
                  "label corruption probability");
  app->add_option("--drop-prob", opts.cfg.noise.drop_prob, "annotation drop probability");
  app->add_option("--noise-seed", opts.cfg.noise.seed, "corruption seed");
  app->add_option("--config", opts.config_path,
                  "JSON run config; fields present in the file override flags");
}

void apply_config_file(ConfigOpts& opts) {
  if (opts.config_path.empty()) return;
  std::ifstream in(opts.config_path);
  if (!in) throw std::runtime_error("cannot open config " + opts.config_path);
  nlohmann::json j;
  in >> j;
  TrainConfig& cfg = opts.cfg;
  if (j.contains("dims")) cfg.dims = j["dims"].get<std::vector<int>>();
  if (j.contains("loss")) {
    const auto& l = j["loss"];
    if (l.contains("kind")) opts.loss_name = l["kind"].get<std::string>();
    if (l.contains("beta")) cfg.loss.beta = l["beta"].get<double>();
    if (l.contains("temperature")) cfg.loss.temperature = l["temperature"].get<double>();
    if (l.contains("k_drop")) cfg.loss.k_drop = l["k_drop"].get<int>();
    if (l.contains("recon_weight")) cfg.loss.recon_weight = l["recon_weight"].get<double>();
  }
  if (j.contains("noise")) {
    const auto& n = j["noise"];
    if (n.contains("mode")) cfg.noise.mode = noise_mode_from_name(n["mode"].get<std::string>());
    if (n.contains("permutation")) cfg.noise.permutation = n["permutation"].get<std::vector<int>>();
    if (n.contains("corrupt_prob")) cfg.noise.corrupt_prob = n["corrupt_prob"].get<double>();
    if (n.contains("drop_prob")) cfg.noise.drop_prob = n["drop_prob"].get<double>();
    if (n.contains("seed")) cfg.noise.seed = n["seed"].get<std::uint64_t>();
  }
  if (j.contains("lr")) cfg.lr = j["lr"].get<double>();
  if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<int>();
  if (j.contains("epochs_pretrain")) cfg.epochs_pretrain = j["epochs_pretrain"].get<int>();
  if (j.contains("epochs_finetune")) cfg.epochs_finetune = j["epochs_finetune"].get<int>();
  if (j.contains("weight_decay")) cfg.weight_decay = j["weight_decay"].get<double>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("eval_subset")) cfg.eval_subset = j["eval_subset"].get<int>();
}

DigitsBundle resolve_digits(const DataOpts& opts, const std::string& out_dir) {
  DigitsBundle bundle = load_digits_corpus(opts.data_dir, opts.synth_train, opts.synth_test,
                                           opts.synth_seed, out_dir + "/corpus");
  if (opts.train_subset > 0 && opts.train_subset < bundle.train.size()) {
    bundle.train = bundle.train.take(opts.train_subset);
  }
  return bundle;
}

int cmd_train(const DataOpts& data_opts, ConfigOpts& config_opts,
              const std::string& out_dir) {
  apply_config_file(config_opts);
  TrainConfig cfg = config_opts.cfg;
  cfg.loss.kind = loss_kind_from_name(config_opts.loss_name);
  if (is_multibox_kind(cfg.loss.kind)) {
    throw std::runtime_error("multibox losses are driven by the `multibox` subcommand");
  }
  cfg.noise.mode = NoiseMode::permutation;
  fs::create_directories(out_dir);

  const DigitsBundle bundle = resolve_digits(data_opts, out_dir);
  std::cout << "corpus: " << bundle.source << " (" << bundle.train.size() << " train / "
            << bundle.test.size() << " test)\n";
  if (cfg.noise.corrupt_prob > 0.0 && cfg.noise.permutation.empty()) {
    cfg.noise.permutation = make_permutation(bundle.train.num_classes(), cfg.noise.seed);
  }

  const TrainOutput out = train(cfg, bundle.train, bundle.test);
  save_run(out.record, out_dir + "/run.json", out_dir + "/metrics.csv");
  save_checkpoint(out.params, out_dir + "/model.json");
  if (out.adapter) {
    write_matrix_csv(adapter_channel(*out.adapter), out_dir + "/adapter_channel.csv");
    write_matrix_csv(out.adapter->weights, out_dir + "/adapter_weights.csv");
  }
  if (out.recon) write_matrix_csv(out.recon->weights, out_dir + "/recon_weights.csv");

  std::cout << "final test metric: " << out.record.final_test_metric << "\n"
            << "artifacts in " << out_dir << "\n";
  return 0;
}

int cmd_sweep(const DataOpts& data_opts, ConfigOpts& config_opts,
              const std::vector<double>& levels, const std::string& out_dir) {
  apply_config_file(config_opts);
  TrainConfig cfg = config_opts.cfg;
  cfg.loss.kind = loss_kind_from_name(config_opts.loss_name);
  fs::create_directories(out_dir);
  const DigitsBundle bundle = resolve_digits(data_opts, out_dir);
  std::cout << "corpus: " << bundle.source << " (" << bundle.train.size() << " train / "
            << bundle.test.size() << " test)\n";

  const SweepOutcome outcome = run_noise_sweep(cfg, levels, bundle.train, bundle.test, out_dir);
  for (const SweepCell& cell : outcome.cells) {
    std::cout << "level " << cell.level << "  " << loss_kind_name(cell.loss)
              << "  accuracy " << cell.final_test_accuracy << "\n";
  }
  std::cout << "wrote " << outcome.csv_path << "\n";
  return 0;
}

int cmd_multibox(MultiboxExperimentConfig& cfg, const std::vector<int>& hidden,
                 const std::string& out_dir) {
  cfg.base.dims.clear();
  cfg.base.dims.push_back(cfg.spec.feature_dim);
  cfg.base.dims.insert(cfg.base.dims.end(), hidden.begin(), hidden.end());
  cfg.base.dims.push_back(cfg.spec.num_priors);
  fs::create_directories(out_dir);
  const MultiboxOutcome outcome = run_multibox_experiment(cfg, out_dir);
  for (const MultiboxRow& row : outcome.rows) {
    std::cout << row.method << "  AP " << row.ap << "  recall@60p " << row.recall_at_60p
              << "\n";
  }
  std::cout << "artifacts in " << out_dir << "\n";
  return 0;
}

int cmd_gradcheck(int instances, std::uint64_t seed) {
  const auto reports = run_gradcheck_suite(instances, seed);
  bool ok = true;
  for (const auto& r : reports) {
    std::printf("%-22s max rel err %.3e  (%d instances)\n", r.name.c_str(), r.max_rel_error,
                r.instances);
    ok = ok && r.max_rel_error <= 1e-4;
  }
  std::cout << (ok ? "gradcheck passed" : "gradcheck FAILED") << "\n";
  return ok ? 0 : 1;
}

int cmd_inspect(const std::string& checkpoint_path, const std::string& run_path,
                const std::string& out_dir) {
  if (!checkpoint_path.empty()) {
    const MlpParams params = load_checkpoint(checkpoint_path);
    fs::create_directories(out_dir);
    std::cout << "dims:";
    for (int d : params.dims) std::cout << " " << d;
    std::cout << "\nhead: " << (params.head == Head::softmax ? "softmax" : "logistic")
              << "\nseed: " << params.seed << "\n";
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
      const std::string stem = out_dir + "/layer" + std::to_string(l);
      write_matrix_csv(params.layers[l].weights, stem + "_weights.csv");
      Matrix bias(1, static_cast<int>(params.layers[l].bias.size()));
      std::copy(params.layers[l].bias.begin(), params.layers[l].bias.end(), bias.data());
      write_matrix_csv(bias, stem + "_bias.csv");
    }
    std::cout << "layer matrices dumped to " << out_dir << "\n";
  }
  if (!run_path.empty()) {
    const RunRecord record = load_run(run_path);  // verifies the checksum
    std::cout << "run: " << loss_kind_name(record.config.loss.kind) << ", seed "
              << record.config.seed << ", epochs " << record.epochs.size()
              << "\nfinal test metric: " << record.final_test_metric
              << "\ncorrupted fraction: " << record.corrupted_fraction
              << "\nchecksum ok\n";
  }
  if (checkpoint_path.empty() && run_path.empty()) {
    throw std::runtime_error("inspect: give --checkpoint and/or --run");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"training on noisy labels with bootstrapped targets"};
  app.require_subcommand(1);

  std::string out_dir = default_out_dir();
  app.add_option("--out", out_dir, "output directory (default $BOOTNET_OUT or ./bootnet_out)");

  DataOpts data_opts;
  ConfigOpts config_opts;
  config_opts.cfg.dims = {784, 500, 300, 10};

  CLI::App* train_cmd = app.add_subcommand("train", "run one training config");
  add_data_flags(train_cmd, data_opts);
  add_config_flags(train_cmd, config_opts);

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "corruption-level sweep over the four objectives");
  std::vector<double> levels = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  sweep_cmd->add_option("--levels", levels, "corruption probabilities")->delimiter(',');
  add_data_flags(sweep_cmd, data_opts);
  add_config_flags(sweep_cmd, config_opts);

  CLI::App* multibox_cmd =
      app.add_subcommand("multibox", "synthetic detection with dropped annotations");
  MultiboxExperimentConfig mb_cfg;
  std::vector<int> mb_hidden = {64};
  multibox_cmd->add_option("--num-priors", mb_cfg.spec.num_priors, "location priors");
  multibox_cmd->add_option("--feature-dim", mb_cfg.spec.feature_dim, "feature width");
  multibox_cmd->add_option("--num-instances", mb_cfg.spec.num_instances, "generated instances");
  multibox_cmd->add_option("--mean-objects", mb_cfg.spec.mean_objects, "mean objects per instance");
  multibox_cmd->add_option("--signal", mb_cfg.spec.signal_strength, "signature strength");
  multibox_cmd->add_option("--clutter", mb_cfg.spec.clutter_sigma, "clutter sigma");
  multibox_cmd->add_option("--gen-seed", mb_cfg.spec.seed, "generator seed");
  multibox_cmd->add_option("--drop-prob", mb_cfg.drop_prob, "annotation drop probability");
  multibox_cmd->add_option("--beta-hard", mb_cfg.beta_hard, "beta for multibox_hard");
  multibox_cmd->add_option("--beta-soft", mb_cfg.beta_soft, "beta for multibox_soft");
  multibox_cmd->add_option("--k-drop", mb_cfg.k_drop, "K for the top-K heuristic");
  multibox_cmd->add_option("--hidden", mb_hidden, "hidden widths")->delimiter(',');
  multibox_cmd->add_option("--lr", mb_cfg.base.lr, "learning rate");
  multibox_cmd->add_option("--batch-size", mb_cfg.base.batch_size, "mini-batch size");
  multibox_cmd->add_option("--epochs-pretrain", mb_cfg.base.epochs_pretrain, "pretrain epochs");
  multibox_cmd->add_option("--epochs-finetune", mb_cfg.base.epochs_finetune, "finetune epochs");
  multibox_cmd->add_option("--weight-decay", mb_cfg.base.weight_decay, "L2 weight decay");
  multibox_cmd->add_option("--seed", mb_cfg.base.seed, "run seed");
  multibox_cmd->add_option("--noise-seed", mb_cfg.base.noise.seed, "drop seed");

  CLI::App* gradcheck_cmd =
      app.add_subcommand("gradcheck", "finite-difference check of every loss");
  int gc_instances = 20;
  std::uint64_t gc_seed = 1234;
  gradcheck_cmd->add_option("--instances", gc_instances, "instances per loss");
  gradcheck_cmd->add_option("--seed", gc_seed, "suite seed");

  CLI::App* inspect_cmd = app.add_subcommand("inspect", "dump checkpoints / verify run records");
  std::string inspect_checkpoint, inspect_run;
  inspect_cmd->add_option("--checkpoint", inspect_checkpoint, "model checkpoint JSON");
  inspect_cmd->add_option("--run", inspect_run, "run record JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return cmd_train(data_opts, config_opts, out_dir);
    if (*sweep_cmd) return cmd_sweep(data_opts, config_opts, levels, out_dir);
    if (*multibox_cmd) return cmd_multibox(mb_cfg, mb_hidden, out_dir);
    if (*gradcheck_cmd) return cmd_gradcheck(gc_instances, gc_seed);
    if (*inspect_cmd) return cmd_inspect(inspect_checkpoint, inspect_run, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
