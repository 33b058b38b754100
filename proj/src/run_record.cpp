#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "bootnet/train.hpp"
#include "json.hpp"

namespace bootnet {

namespace {

constexpr int kSchemaVersion = 1;

std::uint64_t fnv1a_init() { return 0xcbf29ce484222325ull; }

void fnv1a_bytes(std::uint64_t& h, const void* data, std::size_t len) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
}

void fnv1a_double(std::uint64_t& h, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  fnv1a_bytes(h, &bits, sizeof(bits));
}

void fnv1a_u64(std::uint64_t& h, std::uint64_t v) { fnv1a_bytes(h, &v, sizeof(v)); }

void fnv1a_str(std::uint64_t& h, const std::string& s) {
  fnv1a_u64(h, s.size());
  fnv1a_bytes(h, s.data(), s.size());
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = std::vector<double>(m.data(), m.data() + m.size());
  return j;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
  const auto flat = j.at("data").get<std::vector<double>>();
  if (flat.size() != m.size()) throw std::runtime_error("matrix blob size mismatch");
  std::copy(flat.begin(), flat.end(), m.data());
  return m;
}

nlohmann::json config_to_json(const TrainConfig& cfg) {
  nlohmann::json j;
  j["dims"] = cfg.dims;
  j["loss"] = {{"kind", loss_kind_name(cfg.loss.kind)},
               {"beta", cfg.loss.beta},
               {"temperature", cfg.loss.temperature},
               {"k_drop", cfg.loss.k_drop},
               {"recon_weight", cfg.loss.recon_weight}};
  j["noise"] = {{"mode", noise_mode_name(cfg.noise.mode)},
                {"permutation", cfg.noise.permutation},
                {"corrupt_prob", cfg.noise.corrupt_prob},
                {"drop_prob", cfg.noise.drop_prob},
                {"seed", cfg.noise.seed}};
  if (cfg.noise.confusion.size() > 0) {
    j["noise"]["confusion"] = matrix_to_json(cfg.noise.confusion);
  }
  j["lr"] = cfg.lr;
  j["batch_size"] = cfg.batch_size;
  j["epochs_pretrain"] = cfg.epochs_pretrain;
  j["epochs_finetune"] = cfg.epochs_finetune;
  j["weight_decay"] = cfg.weight_decay;
  j["seed"] = cfg.seed;
  j["eval_subset"] = cfg.eval_subset;
  return j;
}

TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  cfg.dims = j.at("dims").get<std::vector<int>>();
  const auto& loss = j.at("loss");
  cfg.loss.kind = loss_kind_from_name(loss.at("kind").get<std::string>());
  cfg.loss.beta = loss.at("beta").get<double>();
  cfg.loss.temperature = loss.at("temperature").get<double>();
  cfg.loss.k_drop = loss.at("k_drop").get<int>();
  cfg.loss.recon_weight = loss.at("recon_weight").get<double>();
  const auto& noise = j.at("noise");
  cfg.noise.mode = noise_mode_from_name(noise.at("mode").get<std::string>());
  cfg.noise.permutation = noise.at("permutation").get<std::vector<int>>();
  cfg.noise.corrupt_prob = noise.at("corrupt_prob").get<double>();
  cfg.noise.drop_prob = noise.at("drop_prob").get<double>();
  cfg.noise.seed = noise.at("seed").get<std::uint64_t>();
  if (noise.contains("confusion")) cfg.noise.confusion = matrix_from_json(noise.at("confusion"));
  cfg.lr = j.at("lr").get<double>();
  cfg.batch_size = j.at("batch_size").get<int>();
  cfg.epochs_pretrain = j.at("epochs_pretrain").get<int>();
  cfg.epochs_finetune = j.at("epochs_finetune").get<int>();
  cfg.weight_decay = j.at("weight_decay").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.eval_subset = j.at("eval_subset").get<int>();
  return cfg;
}

/// Checksum over the deterministic payload: config plus every metric except
/// wall-clock times.
std::uint64_t compute_checksum(const RunRecord& record) {
  std::uint64_t h = fnv1a_init();
  const TrainConfig& cfg = record.config;
  fnv1a_u64(h, cfg.dims.size());
  for (int d : cfg.dims) fnv1a_u64(h, static_cast<std::uint64_t>(d));
  fnv1a_str(h, loss_kind_name(cfg.loss.kind));
  fnv1a_double(h, cfg.loss.beta);
  fnv1a_double(h, cfg.loss.temperature);
  fnv1a_u64(h, static_cast<std::uint64_t>(cfg.loss.k_drop));
  fnv1a_double(h, cfg.loss.recon_weight);
  fnv1a_str(h, noise_mode_name(cfg.noise.mode));
  fnv1a_u64(h, cfg.noise.permutation.size());
  for (int p : cfg.noise.permutation) fnv1a_u64(h, static_cast<std::uint64_t>(p));
  fnv1a_double(h, cfg.noise.corrupt_prob);
  fnv1a_double(h, cfg.noise.drop_prob);
  fnv1a_u64(h, cfg.noise.seed);
  for (std::size_t i = 0; i < cfg.noise.confusion.size(); ++i) {
    fnv1a_double(h, cfg.noise.confusion.data()[i]);
  }
  fnv1a_double(h, cfg.lr);
  fnv1a_u64(h, static_cast<std::uint64_t>(cfg.batch_size));
  fnv1a_u64(h, static_cast<std::uint64_t>(cfg.epochs_pretrain));
  fnv1a_u64(h, static_cast<std::uint64_t>(cfg.epochs_finetune));
  fnv1a_double(h, cfg.weight_decay);
  fnv1a_u64(h, cfg.seed);
  fnv1a_u64(h, record.epochs.size());
  for (const EpochMetrics& e : record.epochs) {
    fnv1a_u64(h, static_cast<std::uint64_t>(e.epoch));
    fnv1a_double(h, e.train_loss);
    fnv1a_double(h, e.test_metric);
    fnv1a_double(h, e.corrupted_fraction);
  }
  fnv1a_double(h, record.final_test_metric);
  fnv1a_double(h, record.final_train_loss);
  fnv1a_double(h, record.corrupted_fraction);
  return h;
}

}  // namespace

void fill_checksum(RunRecord& record) { record.payload_checksum = compute_checksum(record); }

void save_run(const RunRecord& record, const std::string& json_path,
              const std::string& csv_path) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = config_to_json(record.config);
  auto& epochs = j["epochs"] = nlohmann::json::array();
  for (const EpochMetrics& e : record.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"test_metric", e.test_metric},
                      {"corrupted_fraction", e.corrupted_fraction},
                      {"wall_ms", e.wall_ms}});
  }
  j["final_test_metric"] = record.final_test_metric;
  j["final_train_loss"] = record.final_train_loss;
  j["corrupted_fraction"] = record.corrupted_fraction;
  j["wall_ms_total"] = record.wall_ms_total;
  j["payload_checksum"] = record.payload_checksum;

  std::ofstream out(json_path);
  if (!out) throw std::runtime_error("save_run: cannot open " + json_path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("save_run: write failed for " + json_path);

  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("save_run: cannot open " + csv_path);
  const bool multibox = is_multibox_kind(record.config.loss.kind);
  csv << "epoch,train_loss," << (multibox ? "test_ap" : "test_accuracy")
      << ",corrupted_fraction,wall_ms\n";
  char line[192];
  for (const EpochMetrics& e : record.epochs) {
    std::snprintf(line, sizeof(line), "%d,%.9g,%.6f,%.6f,%.3f\n", e.epoch, e.train_loss,
                  e.test_metric, e.corrupted_fraction, e.wall_ms);
    csv << line;
  }
  if (!csv) throw std::runtime_error("save_run: write failed for " + csv_path);
}

RunRecord load_run(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw std::runtime_error("load_run: cannot open " + json_path);
  nlohmann::json j;
  in >> j;
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw std::runtime_error("load_run: unsupported schema version in " + json_path);
  }
  RunRecord record;
  record.config = config_from_json(j.at("config"));
  for (const auto& e : j.at("epochs")) {
    EpochMetrics m;
    m.epoch = e.at("epoch").get<int>();
    m.train_loss = e.at("train_loss").get<double>();
    m.test_metric = e.at("test_metric").get<double>();
    m.corrupted_fraction = e.at("corrupted_fraction").get<double>();
    m.wall_ms = e.at("wall_ms").get<double>();
    record.epochs.push_back(m);
  }
  record.final_test_metric = j.at("final_test_metric").get<double>();
  record.final_train_loss = j.at("final_train_loss").get<double>();
  record.corrupted_fraction = j.at("corrupted_fraction").get<double>();
  record.wall_ms_total = j.at("wall_ms_total").get<double>();
  record.payload_checksum = j.at("payload_checksum").get<std::uint64_t>();
  if (compute_checksum(record) != record.payload_checksum) {
    throw IntegrityError("load_run: checksum mismatch in " + json_path);
  }
  return record;
}

void write_matrix_csv(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_matrix_csv: cannot open " + path);
  char num[48];
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      std::snprintf(num, sizeof(num), "%.9g", m(r, c));
      out << num << (c + 1 == m.cols() ? "\n" : ",");
    }
  }
  if (!out) throw std::runtime_error("write_matrix_csv: write failed for " + path);
}

}  // namespace bootnet
