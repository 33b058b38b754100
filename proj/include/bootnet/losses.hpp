#ifndef BOOTNET_LOSSES_HPP_
#define BOOTNET_LOSSES_HPP_

#include <string>
#include <vector>

#include "bootnet/matrix.hpp"

namespace bootnet {

enum class LossKind {
  ce_baseline,
  bootstrap_soft,
  bootstrap_hard,
  bootstrap_temperature,
  bootstrap_recon,
  noise_marginal,
  multibox_baseline,
  multibox_hard,
  multibox_soft,
  multibox_topk,
};

std::string loss_kind_name(LossKind kind);
LossKind loss_kind_from_name(const std::string& name);
bool is_multibox_kind(LossKind kind);

/// Training objective plus its hyperparameters. Fields irrelevant to the
/// chosen kind are ignored but kept, so a config round-trips unchanged.
struct LossSpec {
  LossKind kind = LossKind::ce_baseline;
  double beta = 1.0;         // convex-combination weight on the observed label
  double temperature = 1.0;  // target softmax temperature
  int k_drop = 0;            // most-confident locations dropped from the loss
  double recon_weight = 0.0; // weight on the reconstruction-consistency term
};

/// L x L channel from predicted class to observed noisy label. Column j of
/// the softmax-normalized weights is the distribution of observed labels
/// given true class j.
struct NoiseAdapter {
  Matrix weights;            // L x L, logit scale
  std::vector<double> bias;  // L, per observed label

  static NoiseAdapter identity(int num_classes);
};

/// D x L linear decoder mapping class probabilities back to feature space.
struct ReconHead {
  Matrix weights;  // feature_dim x num_classes
};

struct LossResult {
  double value = 0.0;
  Matrix dlogits;  // n x L, includes the 1/n batch average
};

struct AdapterLossResult {
  double value = 0.0;
  Matrix dlogits;
  Matrix d_adapter_weights;
  std::vector<double> d_adapter_bias;
};

struct ReconLossResult {
  double value = 0.0;
  Matrix dlogits;
  Matrix d_recon_weights;
};

// All losses are minimized, nonnegative, and averaged over the batch; the
// returned dlogits includes the 1/n factor. Bootstrap targets are computed
// from the current predictions and then held constant inside the step, so
// each loss is, exactly, the cross-entropy against its frozen target.

/// -(1/n) sum_r sum_k t log q, with log arguments clamped below at 1e-12.
LossResult ce_baseline(const Matrix& q, const Matrix& t);

/// Target rows beta*t + (1-beta)*q.
LossResult bootstrap_soft(const Matrix& q, const Matrix& t, double beta);

/// Target rows beta*t + (1-beta)*onehot(argmax q); ties break to the lowest
/// index.
LossResult bootstrap_hard(const Matrix& q, const Matrix& t, double beta);

/// Target rows beta*t + (1-beta)*softmax(temperature * logits); the
/// prediction term uses q at temperature 1. T=1 reproduces bootstrap_soft,
/// large T approaches bootstrap_hard.
LossResult bootstrap_temperature(const Matrix& logits, const Matrix& t,
                                 double beta, double temperature);

/// ce_baseline plus recon_weight * (1/n) sum_r ||x_r - W q_r||^2. The
/// reconstruction term is the consistency pressure: its gradient flows
/// through q into the logits and into the decoder weights.
ReconLossResult bootstrap_recon(const Matrix& x, const Matrix& q,
                                const Matrix& t, const ReconHead& recon,
                                double recon_weight);

/// Marginalized noisy-label posterior: P(t_k | x) = sum_j channel[k][j] q_j,
/// negative log-likelihood of the observed labels, with exact gradients for
/// the logits and the adapter.
AdapterLossResult noise_marginal(const Matrix& q, const Matrix& t,
                                 const NoiseAdapter& adapter);

/// Column-softmax of the adapter: entry (k, j) = P(observed k | true j).
Matrix adapter_channel(const NoiseAdapter& adapter);

/// Per-location logistic cross-entropy, summed over locations and averaged
/// over the batch.
LossResult multibox_baseline(const Matrix& c, const Matrix& t);

/// Per-location target beta*t + (1-beta)*1[c > 0.5] (strict inequality).
LossResult multibox_hard(const Matrix& c, const Matrix& t, double beta);

/// Per-location target beta*t + (1-beta)*c.
LossResult multibox_soft(const Matrix& c, const Matrix& t, double beta);

/// Drops the k_drop largest-confidence locations per instance (ties break to
/// the lowest index) from loss and gradient; the rest follow the baseline.
LossResult multibox_topk(const Matrix& c, const Matrix& t, int k_drop);

// Target builders and the frozen-target cross-entropies behind the losses
// above. Exposed so gradient checks can freeze a target and differentiate
// only the prediction path, which is the same split the losses make.

Matrix soft_targets(const Matrix& q, const Matrix& t, double beta);
Matrix hard_targets(const Matrix& q, const Matrix& t, double beta);
Matrix temperature_targets(const Matrix& logits, const Matrix& t, double beta,
                           double temperature);
Matrix multibox_hard_targets(const Matrix& c, const Matrix& t, double beta);
Matrix multibox_soft_targets(const Matrix& c, const Matrix& t, double beta);

/// 0/1 mask, zero at the k_drop largest-confidence locations per row.
Matrix topk_keep_mask(const Matrix& c, int k_drop);

/// -(1/n) sum s log q with s constant; dlogits = (q * rowsum(s) - s) / n.
LossResult cross_entropy_with_targets(const Matrix& q, const Matrix& targets);

/// -(1/n) sum [s log c + (1-s) log(1-c)] with s constant, optionally masked;
/// dlogits = mask * (c - s) / n.
LossResult binary_cross_entropy_with_targets(const Matrix& c,
                                             const Matrix& targets,
                                             const Matrix* keep_mask = nullptr);

/// value = (1/n) sum_r ||x_r - W q_r||^2 scaled by weight, with gradients
/// through q (chained into the logits) and through W.
ReconLossResult reconstruction_penalty(const Matrix& x, const Matrix& q,
                                       const ReconHead& recon, double weight);

}  // namespace bootnet

#endif  // BOOTNET_LOSSES_HPP_
