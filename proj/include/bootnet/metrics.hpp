#ifndef BOOTNET_METRICS_HPP_
#define BOOTNET_METRICS_HPP_

#include <span>
#include <vector>

#include "bootnet/data.hpp"
#include "bootnet/mlp.hpp"

namespace bootnet {

struct PrPoint {
  double precision = 0.0;
  double recall = 0.0;
  double threshold = 0.0;
};

/// One point per distinct score threshold, swept from the highest score
/// down; recall is nondecreasing along the sweep.
using PrCurve = std::vector<PrPoint>;

/// Fraction of examples where argmax of the prediction equals argmax of the
/// label row, ties broken by lowest index. Throws on an empty dataset.
double evaluate_accuracy(const MlpParams& params, const Dataset& data);

/// Throws std::invalid_argument when labels contain no positives.
PrCurve pr_curve(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Area by all-threshold step-wise interpolation:
/// sum over sweep points of (recall_k - recall_{k-1}) * precision_k.
double average_precision(const PrCurve& curve);

/// Max recall among points with precision >= min_precision; 0 if none.
double recall_at_precision(const PrCurve& curve, double min_precision);

/// Flattens confidences over every (instance, prior) location and scores
/// them against complete binary targets.
double detection_average_precision(const MlpParams& params, const Dataset& data);

PrCurve detection_pr_curve(const MlpParams& params, const Dataset& data);

}  // namespace bootnet

#endif  // BOOTNET_METRICS_HPP_
