#include "bootnet/mlp.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "bootnet/kernels.hpp"
#include "bootnet/rng.hpp"
#include "json.hpp"

namespace bootnet {

MlpParams init_mlp(const std::vector<int>& dims, std::uint64_t seed, Head head) {
  if (dims.size() < 2) {
    throw std::invalid_argument("init_mlp: need at least input and output widths");
  }
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("init_mlp: widths must be positive");
  }
  MlpParams params;
  params.dims = dims;
  params.head = head;
  params.seed = seed;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    LayerParams layer;
    layer.weights = Matrix(fan_in, fan_out);
    const double std_dev = std::sqrt(2.0 / fan_in);
    for (int i = 0; i < fan_in; ++i)
      for (int j = 0; j < fan_out; ++j) layer.weights(i, j) = rng.next_gaussian(std_dev);
    layer.bias.assign(fan_out, 0.0);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

ForwardTrace forward(const MlpParams& params, const Matrix& x, double temperature) {
  if (x.cols() != params.dims.front()) {
    throw std::invalid_argument("forward: input width does not match dims[0]");
  }
  ForwardTrace trace;
  trace.input = x;
  trace.head = params.head;
  trace.temperature = temperature;
  const Matrix* current = &x;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    Matrix z = matmul(*current, params.layers[l].weights);
    add_row_vector(z, params.layers[l].bias);
    trace.pre_acts.push_back(std::move(z));
    if (l + 1 < params.layers.size()) {
      trace.activations.push_back(relu(trace.pre_acts.back()));
      current = &trace.activations.back();
    }
  }
  trace.probs = params.head == Head::softmax
                    ? softmax_rows(trace.pre_acts.back(), temperature)
                    : logistic(trace.pre_acts.back());
  return trace;
}

MlpGrads backward(const MlpParams& params, const ForwardTrace& trace,
                  const Matrix& dlogits) {
  if (!dlogits.same_shape(trace.pre_acts.back())) {
    throw std::invalid_argument("backward: dlogits shape does not match logits");
  }
  MlpGrads grads = zero_grads_like(params);
  const int last = static_cast<int>(params.layers.size()) - 1;
  Matrix dz = dlogits;
  for (int l = last; l >= 0; --l) {
    const Matrix& layer_in = (l == 0) ? trace.input : trace.activations[l - 1];
    grads.layers[l].weights = matmul_at_b(layer_in, dz);
    grads.layers[l].bias = column_sums(dz);
    if (l > 0) {
      Matrix da = matmul_a_bt(dz, params.layers[l].weights);
      dz = relu_backward(da, trace.pre_acts[l - 1]);
    }
  }
  return grads;
}

void sgd_step(MlpParams& params, const MlpGrads& grads, double lr,
              double weight_decay) {
  if (grads.layers.size() != params.layers.size()) {
    throw std::invalid_argument("sgd_step: gradient/parameter layer count mismatch");
  }
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    Matrix& w = params.layers[l].weights;
    const Matrix& gw = grads.layers[l].weights;
    if (!w.same_shape(gw)) throw std::invalid_argument("sgd_step: weight shape mismatch");
    double* pw = w.data();
    const double* pg = gw.data();
    const std::size_t total = w.size();
#pragma omp parallel for simd schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(total); ++i) {
      pw[i] -= lr * (pg[i] + weight_decay * pw[i]);
    }
    auto& b = params.layers[l].bias;
    const auto& gb = grads.layers[l].bias;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] -= lr * gb[i];
  }
}

MlpGrads zero_grads_like(const MlpParams& params) {
  MlpGrads grads;
  for (const auto& layer : params.layers) {
    LayerParams g;
    g.weights = Matrix(layer.weights.rows(), layer.weights.cols());
    g.bias.assign(layer.bias.size(), 0.0);
    grads.layers.push_back(std::move(g));
  }
  return grads;
}

namespace {

constexpr int kCheckpointVersion = 1;

}  // namespace

void save_checkpoint(const MlpParams& params, const std::string& path) {
  nlohmann::json j;
  j["format_version"] = kCheckpointVersion;
  j["dims"] = params.dims;
  j["head"] = params.head == Head::softmax ? "softmax" : "logistic";
  j["seed"] = params.seed;
  auto& layers = j["layers"] = nlohmann::json::array();
  for (const auto& layer : params.layers) {
    nlohmann::json lj;
    lj["rows"] = layer.weights.rows();
    lj["cols"] = layer.weights.cols();
    lj["weights"] = std::vector<double>(layer.weights.data(),
                                        layer.weights.data() + layer.weights.size());
    lj["bias"] = layer.bias;
    layers.push_back(std::move(lj));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out << j.dump();
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

MlpParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  nlohmann::json j;
  in >> j;
  if (j.at("format_version").get<int>() != kCheckpointVersion) {
    throw std::runtime_error("load_checkpoint: unsupported format version in " + path);
  }
  MlpParams params;
  params.dims = j.at("dims").get<std::vector<int>>();
  params.head = j.at("head").get<std::string>() == "softmax" ? Head::softmax : Head::logistic;
  params.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& lj : j.at("layers")) {
    LayerParams layer;
    const int rows = lj.at("rows").get<int>();
    const int cols = lj.at("cols").get<int>();
    const auto flat = lj.at("weights").get<std::vector<double>>();
    if (static_cast<int>(flat.size()) != rows * cols) {
      throw std::runtime_error("load_checkpoint: weight blob size mismatch in " + path);
    }
    layer.weights = Matrix(rows, cols);
    std::copy(flat.begin(), flat.end(), layer.weights.data());
    layer.bias = lj.at("bias").get<std::vector<double>>();
    params.layers.push_back(std::move(layer));
  }
  return params;
}

}  // namespace bootnet
