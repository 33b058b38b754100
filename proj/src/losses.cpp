#include "bootnet/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bootnet/kernels.hpp"

namespace bootnet {

namespace {

constexpr double kLogClamp = 1e-12;

double log_clamped(double v) { return std::log(std::max(v, kLogClamp)); }

void check_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": prediction/target shape mismatch");
  }
}

void check_beta(double beta, const char* what) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw std::invalid_argument(std::string(what) + ": beta must be in [0, 1]");
  }
}

int row_argmax(const Matrix& m, int r) {
  int best = 0;
  for (int j = 1; j < m.cols(); ++j) {
    if (m(r, j) > m(r, best)) best = j;  // ties keep the lowest index
  }
  return best;
}

/// dz_rj = q_rj * (dq_rj - sum_k dq_rk q_rk), the softmax Jacobian applied
/// row-wise.
Matrix chain_through_softmax(const Matrix& q, const Matrix& dq) {
  Matrix dz(q.rows(), q.cols());
  for (int r = 0; r < q.rows(); ++r) {
    double dot = 0.0;
    for (int k = 0; k < q.cols(); ++k) dot += dq(r, k) * q(r, k);
    for (int j = 0; j < q.cols(); ++j) dz(r, j) = q(r, j) * (dq(r, j) - dot);
  }
  return dz;
}

}  // namespace

std::string loss_kind_name(LossKind kind) {
  switch (kind) {
    case LossKind::ce_baseline: return "ce_baseline";
    case LossKind::bootstrap_soft: return "bootstrap_soft";
    case LossKind::bootstrap_hard: return "bootstrap_hard";
    case LossKind::bootstrap_temperature: return "bootstrap_temperature";
    case LossKind::bootstrap_recon: return "bootstrap_recon";
    case LossKind::noise_marginal: return "noise_marginal";
    case LossKind::multibox_baseline: return "multibox_baseline";
    case LossKind::multibox_hard: return "multibox_hard";
    case LossKind::multibox_soft: return "multibox_soft";
    case LossKind::multibox_topk: return "multibox_topk";
  }
  throw std::invalid_argument("loss_kind_name: unknown kind");
}

LossKind loss_kind_from_name(const std::string& name) {
  static const std::pair<const char*, LossKind> table[] = {
      {"ce_baseline", LossKind::ce_baseline},
      {"bootstrap_soft", LossKind::bootstrap_soft},
      {"bootstrap_hard", LossKind::bootstrap_hard},
      {"bootstrap_temperature", LossKind::bootstrap_temperature},
      {"bootstrap_recon", LossKind::bootstrap_recon},
      {"noise_marginal", LossKind::noise_marginal},
      {"multibox_baseline", LossKind::multibox_baseline},
      {"multibox_hard", LossKind::multibox_hard},
      {"multibox_soft", LossKind::multibox_soft},
      {"multibox_topk", LossKind::multibox_topk},
  };
  for (const auto& [n, k] : table) {
    if (name == n) return k;
  }
  throw std::invalid_argument("unknown loss kind: " + name);
}

bool is_multibox_kind(LossKind kind) {
  return kind == LossKind::multibox_baseline || kind == LossKind::multibox_hard ||
         kind == LossKind::multibox_soft || kind == LossKind::multibox_topk;
}

NoiseAdapter NoiseAdapter::identity(int num_classes) {
  NoiseAdapter adapter;
  adapter.weights = Matrix::identity(num_classes);
  adapter.bias.assign(num_classes, 0.0);
  return adapter;
}

LossResult cross_entropy_with_targets(const Matrix& q, const Matrix& targets) {
  check_same_shape(q, targets, "cross_entropy_with_targets");
  const int n = q.rows(), L = q.cols();
  if (n == 0) throw std::invalid_argument("cross_entropy_with_targets: empty batch");
  const double inv_n = 1.0 / n;
  LossResult res;
  res.dlogits = Matrix(n, L);
  std::vector<double> row_loss(n, 0.0);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n; ++r) {
    double acc = 0.0;
    double target_sum = 0.0;
    for (int k = 0; k < L; ++k) {
      acc -= targets(r, k) * log_clamped(q(r, k));
      target_sum += targets(r, k);
    }
    row_loss[r] = acc;
    for (int j = 0; j < L; ++j) {
      res.dlogits(r, j) = (q(r, j) * target_sum - targets(r, j)) * inv_n;
    }
  }
  double total = 0.0;
  for (double v : row_loss) total += v;
  res.value = total * inv_n;
  return res;
}

LossResult ce_baseline(const Matrix& q, const Matrix& t) {
  return cross_entropy_with_targets(q, t);
}

Matrix soft_targets(const Matrix& q, const Matrix& t, double beta) {
  check_same_shape(q, t, "soft_targets");
  check_beta(beta, "soft_targets");
  Matrix s(q.rows(), q.cols());
  for (int r = 0; r < q.rows(); ++r)
    for (int k = 0; k < q.cols(); ++k) s(r, k) = beta * t(r, k) + (1.0 - beta) * q(r, k);
  return s;
}

Matrix hard_targets(const Matrix& q, const Matrix& t, double beta) {
  check_same_shape(q, t, "hard_targets");
  check_beta(beta, "hard_targets");
  Matrix s(q.rows(), q.cols());
  for (int r = 0; r < q.rows(); ++r) {
    const int z = row_argmax(q, r);
    for (int k = 0; k < q.cols(); ++k) {
      s(r, k) = beta * t(r, k) + (k == z ? 1.0 - beta : 0.0);
    }
  }
  return s;
}

Matrix temperature_targets(const Matrix& logits, const Matrix& t, double beta,
                           double temperature) {
  check_same_shape(logits, t, "temperature_targets");
  check_beta(beta, "temperature_targets");
  const Matrix p = softmax_rows(logits, temperature);
  Matrix s(logits.rows(), logits.cols());
  for (int r = 0; r < logits.rows(); ++r)
    for (int k = 0; k < logits.cols(); ++k)
      s(r, k) = beta * t(r, k) + (1.0 - beta) * p(r, k);
  return s;
}

LossResult bootstrap_soft(const Matrix& q, const Matrix& t, double beta) {
  return cross_entropy_with_targets(q, soft_targets(q, t, beta));
}

LossResult bootstrap_hard(const Matrix& q, const Matrix& t, double beta) {
  return cross_entropy_with_targets(q, hard_targets(q, t, beta));
}

LossResult bootstrap_temperature(const Matrix& logits, const Matrix& t,
                                 double beta, double temperature) {
  const Matrix q = softmax_rows(logits, 1.0);
  return cross_entropy_with_targets(q, temperature_targets(logits, t, beta, temperature));
}

ReconLossResult reconstruction_penalty(const Matrix& x, const Matrix& q,
                                       const ReconHead& recon, double weight) {
  if (recon.weights.rows() != x.cols() || recon.weights.cols() != q.cols()) {
    throw std::invalid_argument("reconstruction_penalty: decoder must be feature_dim x num_classes");
  }
  if (x.rows() != q.rows()) {
    throw std::invalid_argument("reconstruction_penalty: batch sizes disagree");
  }
  const int n = x.rows();
  const double scale = weight / n;

  // residual = x - q W^T, value = scale * ||residual||^2
  Matrix xhat = matmul_a_bt(q, recon.weights);  // n x D
  Matrix residual = x;
  axpy(-1.0, xhat, residual);

  double ss = 0.0;
  for (std::size_t i = 0; i < residual.size(); ++i) {
    const double v = residual.data()[i];
    ss += v * v;
  }

  ReconLossResult res;
  res.value = scale * ss;

  // dq = -2 * scale * residual W, then through the softmax into the logits.
  Matrix dq = matmul(residual, recon.weights);
  for (std::size_t i = 0; i < dq.size(); ++i) dq.data()[i] *= -2.0 * scale;
  res.dlogits = chain_through_softmax(q, dq);

  // dW = -2 * scale * residual^T q
  res.d_recon_weights = matmul_at_b(residual, q);
  for (std::size_t i = 0; i < res.d_recon_weights.size(); ++i) {
    res.d_recon_weights.data()[i] *= -2.0 * scale;
  }
  return res;
}

ReconLossResult bootstrap_recon(const Matrix& x, const Matrix& q,
                                const Matrix& t, const ReconHead& recon,
                                double recon_weight) {
  if (recon_weight < 0.0) {
    throw std::invalid_argument("bootstrap_recon: recon_weight must be nonnegative");
  }
  const LossResult ce = ce_baseline(q, t);
  ReconLossResult pen = reconstruction_penalty(x, q, recon, recon_weight);
  pen.value += ce.value;
  axpy(1.0, ce.dlogits, pen.dlogits);
  return pen;
}

Matrix adapter_channel(const NoiseAdapter& adapter) {
  const Matrix& w = adapter.weights;
  if (w.rows() != w.cols()) {
    throw std::invalid_argument("adapter_channel: adapter weights must be square");
  }
  if (static_cast<int>(adapter.bias.size()) != w.rows()) {
    throw std::invalid_argument("adapter_channel: bias length mismatch");
  }
  const int L = w.rows();
  Matrix a(L, L);
  for (int j = 0; j < L; ++j) {  // normalize over observed labels k per true class j
    double mx = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < L; ++k) mx = std::max(mx, w(k, j) + adapter.bias[k]);
    double sum = 0.0;
    for (int k = 0; k < L; ++k) {
      a(k, j) = std::exp(w(k, j) + adapter.bias[k] - mx);
      sum += a(k, j);
    }
    for (int k = 0; k < L; ++k) a(k, j) /= sum;
  }
  return a;
}

AdapterLossResult noise_marginal(const Matrix& q, const Matrix& t,
                                 const NoiseAdapter& adapter) {
  check_same_shape(q, t, "noise_marginal");
  const int n = q.rows(), L = q.cols();
  if (adapter.weights.rows() != L || adapter.weights.cols() != L) {
    throw std::invalid_argument("noise_marginal: adapter must be L x L");
  }
  const Matrix a = adapter_channel(adapter);
  const double inv_n = 1.0 / n;

  AdapterLossResult res;
  res.dlogits = Matrix(n, L);
  res.d_adapter_weights = Matrix(L, L);
  res.d_adapter_bias.assign(L, 0.0);

  Matrix d_channel(L, L);
  double total = 0.0;
  for (int r = 0; r < n; ++r) {
    const int obs = row_argmax(t, r);
    double p_obs = 0.0;
    for (int j = 0; j < L; ++j) p_obs += a(obs, j) * q(r, j);
    total -= log_clamped(p_obs);

    const double dp = -inv_n / std::max(p_obs, kLogClamp);
    // dq through the marginal, then through the softmax.
    double dot = 0.0;
    std::vector<double> dq(L);
    for (int j = 0; j < L; ++j) {
      dq[j] = dp * a(obs, j);
      dot += dq[j] * q(r, j);
    }
    for (int j = 0; j < L; ++j) res.dlogits(r, j) = q(r, j) * (dq[j] - dot);
    // d channel accumulates the outer product dp * e_obs q_r^T.
    for (int j = 0; j < L; ++j) d_channel(obs, j) += dp * q(r, j);
  }
  res.value = total * inv_n;

  // Column-softmax backward: for each true class j,
  // du_kj = a_kj * (dA_kj - <dA_,j, a_,j>).
  for (int j = 0; j < L; ++j) {
    double dot = 0.0;
    for (int k = 0; k < L; ++k) dot += d_channel(k, j) * a(k, j);
    for (int k = 0; k < L; ++k) {
      const double du = a(k, j) * (d_channel(k, j) - dot);
      res.d_adapter_weights(k, j) = du;
      res.d_adapter_bias[k] += du;
    }
  }
  return res;
}

LossResult binary_cross_entropy_with_targets(const Matrix& c,
                                             const Matrix& targets,
                                             const Matrix* keep_mask) {
  check_same_shape(c, targets, "binary_cross_entropy_with_targets");
  if (keep_mask != nullptr) check_same_shape(c, *keep_mask, "binary_cross_entropy_with_targets(mask)");
  const int n = c.rows(), L = c.cols();
  if (n == 0) throw std::invalid_argument("binary_cross_entropy_with_targets: empty batch");
  const double inv_n = 1.0 / n;
  LossResult res;
  res.dlogits = Matrix(n, L);
  double total = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int k = 0; k < L; ++k) {
      const double keep = keep_mask ? (*keep_mask)(r, k) : 1.0;
      if (keep == 0.0) {
        res.dlogits(r, k) = 0.0;
        continue;
      }
      const double s = targets(r, k);
      total -= keep * (s * log_clamped(c(r, k)) + (1.0 - s) * log_clamped(1.0 - c(r, k)));
      res.dlogits(r, k) = keep * (c(r, k) - s) * inv_n;
    }
  }
  res.value = total * inv_n;
  return res;
}

LossResult multibox_baseline(const Matrix& c, const Matrix& t) {
  return binary_cross_entropy_with_targets(c, t);
}

Matrix multibox_hard_targets(const Matrix& c, const Matrix& t, double beta) {
  check_same_shape(c, t, "multibox_hard_targets");
  check_beta(beta, "multibox_hard_targets");
  Matrix s(c.rows(), c.cols());
  for (int r = 0; r < c.rows(); ++r)
    for (int k = 0; k < c.cols(); ++k)
      s(r, k) = beta * t(r, k) + (c(r, k) > 0.5 ? 1.0 - beta : 0.0);
  return s;
}

Matrix multibox_soft_targets(const Matrix& c, const Matrix& t, double beta) {
  check_same_shape(c, t, "multibox_soft_targets");
  check_beta(beta, "multibox_soft_targets");
  Matrix s(c.rows(), c.cols());
  for (int r = 0; r < c.rows(); ++r)
    for (int k = 0; k < c.cols(); ++k)
      s(r, k) = beta * t(r, k) + (1.0 - beta) * c(r, k);
  return s;
}

LossResult multibox_hard(const Matrix& c, const Matrix& t, double beta) {
  return binary_cross_entropy_with_targets(c, multibox_hard_targets(c, t, beta));
}

LossResult multibox_soft(const Matrix& c, const Matrix& t, double beta) {
  return binary_cross_entropy_with_targets(c, multibox_soft_targets(c, t, beta));
}

Matrix topk_keep_mask(const Matrix& c, int k_drop) {
  if (k_drop < 0 || k_drop > c.cols()) {
    throw std::invalid_argument("topk_keep_mask: k_drop must be in [0, L]");
  }
  Matrix mask(c.rows(), c.cols(), 1.0);
  if (k_drop == 0) return mask;
  std::vector<int> order(c.cols());
  for (int r = 0; r < c.rows(); ++r) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (c(r, a) != c(r, b)) return c(r, a) > c(r, b);
      return a < b;
    });
    for (int i = 0; i < k_drop; ++i) mask(r, order[i]) = 0.0;
  }
  return mask;
}

LossResult multibox_topk(const Matrix& c, const Matrix& t, int k_drop) {
  const Matrix mask = topk_keep_mask(c, k_drop);
  return binary_cross_entropy_with_targets(c, t, &mask);
}

}  // namespace bootnet
