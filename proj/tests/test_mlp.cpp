#include <cmath>
#include <cstdio>
#include <filesystem>

#include "bootnet/gradcheck.hpp"
#include "bootnet/kernels.hpp"
#include "bootnet/losses.hpp"
#include "bootnet/mlp.hpp"
#include "bootnet/rng.hpp"
#include "doctest.h"

using namespace bootnet;

namespace {

Matrix random_matrix(Rng& rng, int rows, int cols, double sigma = 1.0) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.next_gaussian(sigma);
  return m;
}

bool params_equal(const MlpParams& a, const MlpParams& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    if (!(a.layers[l].weights == b.layers[l].weights)) return false;
    if (a.layers[l].bias != b.layers[l].bias) return false;
  }
  return a.dims == b.dims && a.head == b.head && a.seed == b.seed;
}

// Loss of the network as a function of one layer's weights (or bias), used
// to finite-difference every parameter.
double net_loss(MlpParams params, const Matrix& x, const Matrix& t) {
  const ForwardTrace trace = forward(params, x);
  if (params.head == Head::softmax) return ce_baseline(trace.probs, t).value;
  return multibox_baseline(trace.probs, t).value;
}

}  // namespace

TEST_SUITE("mlp") {

TEST_CASE("layer shapes chain per dims") {
  const MlpParams params = init_mlp({784, 500, 300, 10}, 5);
  REQUIRE(params.layers.size() == 3);
  CHECK(params.layers[0].weights.rows() == 784);
  CHECK(params.layers[0].weights.cols() == 500);
  CHECK(params.layers[1].weights.rows() == 500);
  CHECK(params.layers[1].weights.cols() == 300);
  CHECK(params.layers[2].weights.rows() == 300);
  CHECK(params.layers[2].weights.cols() == 10);
  for (const auto& layer : params.layers) {
    for (double b : layer.bias) CHECK(b == 0.0);
  }
}

TEST_CASE("init is deterministic per seed") {
  CHECK(params_equal(init_mlp({2, 2}, 99), init_mlp({2, 2}, 99)));
  CHECK_FALSE(params_equal(init_mlp({2, 2}, 99), init_mlp({2, 2}, 100)));
}

TEST_CASE("init rejects bad dims") {
  CHECK_THROWS_AS(init_mlp({5}, 1), std::invalid_argument);
  CHECK_THROWS_AS(init_mlp({5, 0, 2}, 1), std::invalid_argument);
}

TEST_CASE("first-layer sample std is near sqrt(2/fan_in)") {
  const MlpParams params = init_mlp({784, 500, 300, 10}, 17);
  const Matrix& w = params.layers[0].weights;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    sum += w.data()[i];
    sum_sq += w.data()[i] * w.data()[i];
  }
  const double mean = sum / w.size();
  const double std_dev = std::sqrt(sum_sq / w.size() - mean * mean);
  const double expected = std::sqrt(2.0 / 784.0);
  CHECK(std_dev >= 0.9 * expected);
  CHECK(std_dev <= 1.1 * expected);
}

TEST_CASE("all-zero weights give a uniform posterior") {
  MlpParams params = init_mlp({6, 4, 5}, 3);
  for (auto& layer : params.layers) {
    layer.weights = Matrix(layer.weights.rows(), layer.weights.cols());
  }
  Rng rng(4);
  const Matrix x = random_matrix(rng, 3, 6);
  const ForwardTrace trace = forward(params, x);
  for (int r = 0; r < 3; ++r)
    for (int j = 0; j < 5; ++j) CHECK(trace.probs(r, j) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("single linear layer reproduces a direct softmax of inputs") {
  MlpParams params = init_mlp({2, 2}, 8);
  params.layers[0].weights = Matrix::identity(2);
  params.layers[0].bias = {0.0, 0.0};
  Matrix x{{0.3, -1.2}, {2.0, 0.5}};
  const ForwardTrace trace = forward(params, x);
  const Matrix direct = softmax_rows(x, 1.0);
  for (int r = 0; r < 2; ++r)
    for (int j = 0; j < 2; ++j) CHECK(trace.probs(r, j) == doctest::Approx(direct(r, j)));
}

TEST_CASE("forward is bit-deterministic and traces ReLU exactly") {
  const MlpParams params = init_mlp({5, 4, 3}, 12);
  Rng rng(13);
  const Matrix x = random_matrix(rng, 7, 5);
  const ForwardTrace a = forward(params, x);
  const ForwardTrace b = forward(params, x);
  CHECK(a.probs == b.probs);
  CHECK(a.pre_acts[0] == b.pre_acts[0]);
  REQUIRE(a.activations.size() == 1);
  for (int r = 0; r < 7; ++r)
    for (int j = 0; j < 4; ++j)
      CHECK(a.activations[0](r, j) == std::max(0.0, a.pre_acts[0](r, j)));
}

TEST_CASE("forward rejects mismatched input width") {
  const MlpParams params = init_mlp({5, 3}, 1);
  CHECK_THROWS_AS(forward(params, Matrix(2, 4)), std::invalid_argument);
}

TEST_CASE("zero dlogits give zero gradients") {
  const MlpParams params = init_mlp({4, 3, 2}, 21);
  Rng rng(22);
  const Matrix x = random_matrix(rng, 3, 4);
  const ForwardTrace trace = forward(params, x);
  const MlpGrads grads = backward(params, trace, Matrix(3, 2));
  for (const auto& layer : grads.layers) {
    for (std::size_t i = 0; i < layer.weights.size(); ++i) CHECK(layer.weights.data()[i] == 0.0);
    for (double b : layer.bias) CHECK(b == 0.0);
  }
}

TEST_CASE("one-layer gradients equal the softmax-regression closed form") {
  const MlpParams params = init_mlp({4, 3}, 31);
  Rng rng(32);
  const Matrix x = random_matrix(rng, 5, 4);
  Matrix t(5, 3);
  for (int r = 0; r < 5; ++r) t(r, static_cast<int>(rng.next_below(3))) = 1.0;
  const ForwardTrace trace = forward(params, x);
  const LossResult loss = ce_baseline(trace.probs, t);
  const MlpGrads grads = backward(params, trace, loss.dlogits);

  // dW = x^T (q - t) / n, db = colsum(q - t) / n.
  Matrix diff(5, 3);
  for (int r = 0; r < 5; ++r)
    for (int j = 0; j < 3; ++j) diff(r, j) = (trace.probs(r, j) - t(r, j)) / 5.0;
  const Matrix expected_w = matmul_at_b(x, diff);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(grads.layers[0].weights(i, j) == doctest::Approx(expected_w(i, j)).epsilon(1e-12));
  const auto expected_b = column_sums(diff);
  for (int j = 0; j < 3; ++j)
    CHECK(grads.layers[0].bias[j] == doctest::Approx(expected_b[j]).epsilon(1e-12));
}

TEST_CASE("deep-net gradients match finite differences on every parameter") {
  for (const Head head : {Head::softmax, Head::logistic}) {
    const MlpParams params = init_mlp({4, 3, 2}, 41, head);
    Rng rng(42);
    const Matrix x = random_matrix(rng, 3, 4);
    Matrix t(3, 2);
    if (head == Head::softmax) {
      for (int r = 0; r < 3; ++r) t(r, static_cast<int>(rng.next_below(2))) = 1.0;
    } else {
      for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = rng.next_uniform() < 0.5;
    }

    const ForwardTrace trace = forward(params, x);
    const Matrix dlogits = head == Head::softmax
                               ? ce_baseline(trace.probs, t).dlogits
                               : multibox_baseline(trace.probs, t).dlogits;
    const MlpGrads grads = backward(params, trace, dlogits);

    for (std::size_t l = 0; l < params.layers.size(); ++l) {
      const Matrix numeric_w = finite_diff_grad(
          [&](const Matrix& w) {
            MlpParams probe = params;
            probe.layers[l].weights = w;
            return net_loss(probe, x, t);
          },
          params.layers[l].weights);
      CHECK(gradient_rel_error(grads.layers[l].weights, numeric_w) <= 1e-4);

      Matrix bias_row(1, static_cast<int>(params.layers[l].bias.size()));
      std::copy(params.layers[l].bias.begin(), params.layers[l].bias.end(), bias_row.data());
      const Matrix numeric_b = finite_diff_grad(
          [&](const Matrix& b) {
            MlpParams probe = params;
            probe.layers[l].bias.assign(b.data(), b.data() + b.size());
            return net_loss(probe, x, t);
          },
          bias_row);
      Matrix analytic_b(1, static_cast<int>(grads.layers[l].bias.size()));
      std::copy(grads.layers[l].bias.begin(), grads.layers[l].bias.end(), analytic_b.data());
      CHECK(gradient_rel_error(analytic_b, numeric_b) <= 1e-4);
    }
  }
}

TEST_CASE("sgd_step arithmetic") {
  MlpParams params = init_mlp({1, 1}, 51);
  params.layers[0].weights(0, 0) = 1.0;
  params.layers[0].bias[0] = 0.5;
  MlpGrads grads = zero_grads_like(params);

  SUBCASE("lr zero leaves parameters untouched") {
    grads.layers[0].weights(0, 0) = 3.0;
    sgd_step(params, grads, 0.0, 0.1);
    CHECK(params.layers[0].weights(0, 0) == 1.0);
  }
  SUBCASE("zero gradient and zero decay is a no-op") {
    sgd_step(params, grads, 0.5, 0.0);
    CHECK(params.layers[0].weights(0, 0) == 1.0);
    CHECK(params.layers[0].bias[0] == 0.5);
  }
  SUBCASE("scalar update with decay, bias exempt") {
    grads.layers[0].weights(0, 0) = 1.0;
    grads.layers[0].bias[0] = 1.0;
    sgd_step(params, grads, 0.1, 0.0001);
    CHECK(params.layers[0].weights(0, 0) == doctest::Approx(0.89999).epsilon(1e-12));
    CHECK(params.layers[0].bias[0] == doctest::Approx(0.4).epsilon(1e-12));
  }
}

TEST_CASE("checkpoint round-trip is lossless") {
  const MlpParams params = init_mlp({7, 5, 3}, 61, Head::logistic);
  const std::string path = (std::filesystem::temp_directory_path() / "bootnet_ckpt.json").string();
  save_checkpoint(params, path);
  const MlpParams loaded = load_checkpoint(path);
  CHECK(params_equal(params, loaded));
  std::filesystem::remove(path);
}

}  // TEST_SUITE
