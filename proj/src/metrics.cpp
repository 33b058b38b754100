#include "bootnet/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace bootnet {

namespace {

int row_argmax(const Matrix& m, int r) {
  int best = 0;
  for (int j = 1; j < m.cols(); ++j) {
    if (m(r, j) > m(r, best)) best = j;
  }
  return best;
}

}  // namespace

double evaluate_accuracy(const MlpParams& params, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("evaluate_accuracy: empty dataset");
  const ForwardTrace trace = forward(params, data.features);
  int correct = 0;
  for (int i = 0; i < data.size(); ++i) {
    if (row_argmax(trace.probs, i) == row_argmax(data.labels, i)) ++correct;
  }
  return static_cast<double>(correct) / data.size();
}

PrCurve pr_curve(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("pr_curve: scores/labels length mismatch");
  }
  long total_positives = 0;
  for (const auto l : labels) total_positives += l != 0;
  if (total_positives == 0) {
    throw std::invalid_argument("pr_curve: no positive labels");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });

  PrCurve curve;
  long tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (labels[order[i]] != 0) ++tp; else ++fp;
    // Emit one point per distinct threshold: wait until the score changes.
    if (i + 1 < order.size() && scores[order[i + 1]] == scores[order[i]]) continue;
    curve.push_back({static_cast<double>(tp) / (tp + fp),
                     static_cast<double>(tp) / total_positives,
                     scores[order[i]]});
  }
  return curve;
}

double average_precision(const PrCurve& curve) {
  double ap = 0.0;
  double prev_recall = 0.0;
  for (const auto& p : curve) {
    ap += (p.recall - prev_recall) * p.precision;
    prev_recall = p.recall;
  }
  return ap;
}

double recall_at_precision(const PrCurve& curve, double min_precision) {
  double best = 0.0;
  for (const auto& p : curve) {
    if (p.precision >= min_precision) best = std::max(best, p.recall);
  }
  return best;
}

PrCurve detection_pr_curve(const MlpParams& params, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("detection_pr_curve: empty dataset");
  const ForwardTrace trace = forward(params, data.features);
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  scores.reserve(trace.probs.size());
  labels.reserve(trace.probs.size());
  for (int i = 0; i < data.size(); ++i) {
    for (int k = 0; k < data.num_classes(); ++k) {
      scores.push_back(trace.probs(i, k));
      labels.push_back(data.labels(i, k) == 1.0 ? 1 : 0);
    }
  }
  return pr_curve(scores, labels);
}

double detection_average_precision(const MlpParams& params, const Dataset& data) {
  return average_precision(detection_pr_curve(params, data));
}

}  // namespace bootnet
