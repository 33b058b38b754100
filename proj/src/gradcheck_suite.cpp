#include <algorithm>
#include <cmath>

#include "bootnet/gradcheck.hpp"
#include "bootnet/kernels.hpp"
#include "bootnet/losses.hpp"
#include "bootnet/rng.hpp"

namespace bootnet {

namespace {

Matrix random_matrix(Rng& rng, int rows, int cols, double sigma) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.next_gaussian(sigma);
  return m;
}

Matrix random_onehot(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) m(r, static_cast<int>(rng.next_below(cols))) = 1.0;
  return m;
}

Matrix random_binary(Rng& rng, int rows, int cols, double p) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.next_uniform() < p ? 1.0 : 0.0;
  return m;
}

Matrix bias_as_row(const std::vector<double>& bias) {
  Matrix m(1, static_cast<int>(bias.size()));
  std::copy(bias.begin(), bias.end(), m.data());
  return m;
}

struct Instance {
  int n, L, D;
  Matrix logits;   // n x L
  Matrix onehot;   // n x L
  Matrix binary;   // n x L
  Matrix x;        // n x D, in [0,1]
};

Instance draw_instance(Rng& rng) {
  Instance inst;
  inst.n = 1 + static_cast<int>(rng.next_below(3));
  inst.L = 2 + static_cast<int>(rng.next_below(4));
  inst.D = inst.L + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(7 - inst.L)));
  inst.logits = random_matrix(rng, inst.n, inst.L, 1.5);
  inst.onehot = random_onehot(rng, inst.n, inst.L);
  inst.binary = random_binary(rng, inst.n, inst.L, 0.4);
  inst.x = Matrix(inst.n, inst.D);
  for (std::size_t i = 0; i < inst.x.size(); ++i) inst.x.data()[i] = rng.next_uniform();
  return inst;
}

}  // namespace

std::vector<GradCheckReport> run_gradcheck_suite(int instances_per_loss,
                                                 std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GradCheckReport> reports;
  auto report_of = [&reports](const std::string& name) -> GradCheckReport& {
    for (auto& r : reports) {
      if (r.name == name) return r;
    }
    reports.push_back({name, 0.0, 0});
    return reports.back();
  };
  auto note = [&](const std::string& name, double err) {
    GradCheckReport& r = report_of(name);
    r.max_rel_error = std::max(r.max_rel_error, err);
    r.instances += 1;
  };

  for (int it = 0; it < instances_per_loss; ++it) {
    const Instance inst = draw_instance(rng);
    const Matrix q0 = softmax_rows(inst.logits, 1.0);
    const Matrix c0 = logistic(inst.logits);
    const double beta = 0.5 + 0.5 * rng.next_uniform();
    const double temp = 0.5 + 2.0 * rng.next_uniform();

    // --- multi-class family: frozen target, differentiate the logits ---
    struct SoftCase {
      const char* name;
      Matrix target;
      Matrix analytic;
    };
    std::vector<SoftCase> soft_cases;
    soft_cases.push_back({"ce_baseline", inst.onehot, ce_baseline(q0, inst.onehot).dlogits});
    soft_cases.push_back({"bootstrap_soft", soft_targets(q0, inst.onehot, beta),
                          bootstrap_soft(q0, inst.onehot, beta).dlogits});
    soft_cases.push_back({"bootstrap_hard", hard_targets(q0, inst.onehot, beta),
                          bootstrap_hard(q0, inst.onehot, beta).dlogits});
    soft_cases.push_back(
        {"bootstrap_temperature", temperature_targets(inst.logits, inst.onehot, beta, temp),
         bootstrap_temperature(inst.logits, inst.onehot, beta, temp).dlogits});
    for (const auto& sc : soft_cases) {
      const Matrix target = sc.target;
      const Matrix numeric = finite_diff_grad(
          [&](const Matrix& z) {
            return cross_entropy_with_targets(softmax_rows(z, 1.0), target).value;
          },
          inst.logits);
      note(sc.name, gradient_rel_error(sc.analytic, numeric));
    }

    // --- bootstrap_recon: gradient flows through q and the decoder ---
    {
      ReconHead recon{random_matrix(rng, inst.D, inst.L, 1.0)};
      const double weight = 0.2 + rng.next_uniform();
      const ReconLossResult res = bootstrap_recon(inst.x, q0, inst.onehot, recon, weight);
      const Matrix num_logits = finite_diff_grad(
          [&](const Matrix& z) {
            return bootstrap_recon(inst.x, softmax_rows(z, 1.0), inst.onehot, recon, weight)
                .value;
          },
          inst.logits);
      double err = gradient_rel_error(res.dlogits, num_logits);
      const Matrix num_w = finite_diff_grad(
          [&](const Matrix& w) {
            return bootstrap_recon(inst.x, q0, inst.onehot, ReconHead{w}, weight).value;
          },
          recon.weights);
      err = std::max(err, gradient_rel_error(res.d_recon_weights, num_w));
      note("bootstrap_recon", err);
    }

    // --- noise_marginal: logits, adapter weights, adapter bias ---
    {
      NoiseAdapter adapter;
      adapter.weights = random_matrix(rng, inst.L, inst.L, 1.0);
      adapter.bias = rng.gaussians(inst.L, 1.0);
      const AdapterLossResult res = noise_marginal(q0, inst.onehot, adapter);
      const Matrix num_logits = finite_diff_grad(
          [&](const Matrix& z) {
            return noise_marginal(softmax_rows(z, 1.0), inst.onehot, adapter).value;
          },
          inst.logits);
      double err = gradient_rel_error(res.dlogits, num_logits);
      const Matrix num_w = finite_diff_grad(
          [&](const Matrix& w) {
            NoiseAdapter probe{w, adapter.bias};
            return noise_marginal(q0, inst.onehot, probe).value;
          },
          adapter.weights);
      err = std::max(err, gradient_rel_error(res.d_adapter_weights, num_w));
      const Matrix num_b = finite_diff_grad(
          [&](const Matrix& b) {
            NoiseAdapter probe{adapter.weights,
                               std::vector<double>(b.data(), b.data() + b.size())};
            return noise_marginal(q0, inst.onehot, probe).value;
          },
          bias_as_row(adapter.bias));
      err = std::max(err, gradient_rel_error(bias_as_row(res.d_adapter_bias), num_b));
      note("noise_marginal", err);
    }

    // --- multibox family: frozen target / frozen drop mask ---
    {
      const Matrix numeric = finite_diff_grad(
          [&](const Matrix& z) {
            return binary_cross_entropy_with_targets(logistic(z), inst.binary).value;
          },
          inst.logits);
      note("multibox_baseline",
           gradient_rel_error(multibox_baseline(c0, inst.binary).dlogits, numeric));
    }
    {
      const Matrix target = multibox_hard_targets(c0, inst.binary, beta);
      const Matrix numeric = finite_diff_grad(
          [&](const Matrix& z) {
            return binary_cross_entropy_with_targets(logistic(z), target).value;
          },
          inst.logits);
      note("multibox_hard",
           gradient_rel_error(multibox_hard(c0, inst.binary, beta).dlogits, numeric));
    }
    {
      const Matrix target = multibox_soft_targets(c0, inst.binary, beta);
      const Matrix numeric = finite_diff_grad(
          [&](const Matrix& z) {
            return binary_cross_entropy_with_targets(logistic(z), target).value;
          },
          inst.logits);
      note("multibox_soft",
           gradient_rel_error(multibox_soft(c0, inst.binary, beta).dlogits, numeric));
    }
    {
      const int k_drop = static_cast<int>(rng.next_below(inst.L + 1));
      const Matrix mask = topk_keep_mask(c0, k_drop);
      const Matrix numeric = finite_diff_grad(
          [&](const Matrix& z) {
            return binary_cross_entropy_with_targets(logistic(z), inst.binary, &mask).value;
          },
          inst.logits);
      note("multibox_topk",
           gradient_rel_error(multibox_topk(c0, inst.binary, k_drop).dlogits, numeric));
    }
  }
  return reports;
}

}  // namespace bootnet
