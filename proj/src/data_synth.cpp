#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bootnet/data.hpp"
#include "bootnet/kernels.hpp"
#include "bootnet/rng.hpp"

namespace bootnet {

namespace {

// 5x7 dot-matrix glyphs for 0..9, one byte per row, low 5 bits used.
constexpr unsigned char kGlyphs[10][7] = {
    {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E},  // 0
    {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E},  // 1
    {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F},  // 2
    {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E},  // 3
    {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02},  // 4
    {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E},  // 5
    {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E},  // 6
    {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},  // 7
    {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E},  // 8
    {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C},  // 9
};

constexpr int kImageSide = 28;
constexpr int kCell = 3;  // glyph cell -> 3x3 pixel block, 15x21 core

double prototype_pixel(int digit, double x, double y) {
  // Glyph core pasted centered: x in [6.5, 21.5), y in [3.5, 24.5).
  const double gx = (x - 6.5) / kCell;
  const double gy = (y - 3.5) / kCell;
  const int cx = static_cast<int>(std::floor(gx));
  const int cy = static_cast<int>(std::floor(gy));
  if (cx < 0 || cx >= 5 || cy < 0 || cy >= 7) return 0.0;
  return (kGlyphs[digit][cy] >> (4 - cx)) & 1 ? 1.0 : 0.0;
}

}  // namespace

Dataset synth_digits(int num_examples, std::uint64_t seed) {
  if (num_examples < 0) throw std::invalid_argument("synth_digits: negative count");
  Dataset data;
  data.mode = DatasetMode::multiclass;
  data.name = "synth-digits";
  data.provenance = "procedural dot-matrix digits, seed " + std::to_string(seed);
  data.features = Matrix(num_examples, kImageSide * kImageSide);
  data.labels = Matrix(num_examples, 10);
  Rng rng(seed);
  const double half = (kImageSide - 1) / 2.0;
  for (int i = 0; i < num_examples; ++i) {
    const int digit = static_cast<int>(rng.next_below(10));
    data.labels(i, digit) = 1.0;
    const double dx = rng.next_uniform() * 6.0 - 3.0;
    const double dy = rng.next_uniform() * 6.0 - 3.0;
    const double angle = rng.next_uniform() * 0.44 - 0.22;
    const double scale = 0.85 + rng.next_uniform() * 0.3;
    const double intensity = 0.65 + rng.next_uniform() * 0.35;
    const double ca = std::cos(angle), sa = std::sin(angle);
    double* px = data.features.data() + static_cast<std::size_t>(i) * kImageSide * kImageSide;
    for (int y = 0; y < kImageSide; ++y) {
      for (int x = 0; x < kImageSide; ++x) {
        // Inverse map: undo translation, rotation, scale about the center.
        const double rx = x - half - dx;
        const double ry = y - half - dy;
        const double sx = (ca * rx + sa * ry) / scale + half;
        const double sy = (-sa * rx + ca * ry) / scale + half;
        // 2x2 supersample for soft edges.
        double v = 0.0;
        v += prototype_pixel(digit, sx - 0.25, sy - 0.25);
        v += prototype_pixel(digit, sx + 0.25, sy - 0.25);
        v += prototype_pixel(digit, sx - 0.25, sy + 0.25);
        v += prototype_pixel(digit, sx + 0.25, sy + 0.25);
        double value = intensity * (v / 4.0) + rng.next_gaussian(0.08);
        value = std::clamp(value, 0.0, 1.0);
        px[y * kImageSide + x] = std::round(value * 255.0) / 255.0;
      }
    }
  }
  return data;
}

SynthDetection synth_detection(const SynthDetectionSpec& spec) {
  if (spec.num_priors < 2) throw std::invalid_argument("synth_detection: need num_priors >= 2");
  if (spec.feature_dim < spec.num_priors) {
    throw std::invalid_argument("synth_detection: feature_dim must be >= num_priors");
  }
  if (spec.num_instances < 0 || spec.mean_objects < 0.0 || spec.signal_strength < 0.0 ||
      spec.clutter_sigma < 0.0) {
    throw std::invalid_argument("synth_detection: negative spec parameter");
  }
  const int L = spec.num_priors, D = spec.feature_dim, n = spec.num_instances;
  Rng rng(spec.seed);

  // Orthonormal signatures: Gaussian rows, Gram-Schmidt.
  Matrix sig(L, D);
  for (int k = 0; k < L; ++k) {
    for (int d = 0; d < D; ++d) sig(k, d) = rng.next_gaussian(1.0);
    for (int prev = 0; prev < k; ++prev) {
      double dot = 0.0;
      for (int d = 0; d < D; ++d) dot += sig(k, d) * sig(prev, d);
      for (int d = 0; d < D; ++d) sig(k, d) -= dot * sig(prev, d);
    }
    double norm = 0.0;
    for (int d = 0; d < D; ++d) norm += sig(k, d) * sig(k, d);
    norm = std::sqrt(norm);
    if (norm < 1e-9) throw std::runtime_error("synth_detection: degenerate signature draw");
    for (int d = 0; d < D; ++d) sig(k, d) /= norm;
  }

  SynthDetection out;
  out.spec = spec;
  out.signatures = sig;
  out.data.mode = DatasetMode::multibox;
  out.data.name = "synth-detection";
  out.data.provenance = "orthonormal-signature generator, seed " + std::to_string(spec.seed);
  out.data.features = Matrix(n, D);
  out.data.labels = Matrix(n, L);
  out.bayes_scores = Matrix(n, L);

  std::vector<double> raw(D);
  for (int i = 0; i < n; ++i) {
    // Object count: Poisson(mean_objects) truncated to [0, L], inverse CDF.
    int count = 0;
    if (spec.mean_objects > 0.0) {
      const double u = rng.next_uniform();
      double p = std::exp(-spec.mean_objects), cum = p;
      while (u >= cum && count < L) {
        ++count;
        p *= spec.mean_objects / count;
        cum += p;
      }
    }
    const std::vector<int> order = rng.permutation(L);
    for (int d = 0; d < D; ++d) raw[d] = rng.next_gaussian(spec.clutter_sigma);
    for (int c = 0; c < count; ++c) {
      const int k = order[c];
      out.data.labels(i, k) = 1.0;
      for (int d = 0; d < D; ++d) raw[d] += spec.signal_strength * sig(k, d);
    }
    for (int d = 0; d < D; ++d) {
      out.data.features(i, d) = 1.0 / (1.0 + std::exp(-raw[d]));
    }
    for (int k = 0; k < L; ++k) {
      double dot = 0.0;
      for (int d = 0; d < D; ++d) dot += raw[d] * sig(k, d);
      out.bayes_scores(i, k) = dot;
    }
  }
  return out;
}

SplitResult split(const Dataset& data, double train_frac, double val_frac,
                  double test_frac, std::uint64_t seed) {
  if (train_frac < 0.0 || val_frac < 0.0 || test_frac < 0.0 ||
      std::fabs(train_frac + val_frac + test_frac - 1.0) > 1e-9) {
    throw std::invalid_argument("split: fractions must be nonnegative and sum to 1");
  }
  Rng rng(seed);

  std::vector<std::vector<int>> groups;
  if (data.mode == DatasetMode::multiclass) {
    groups.assign(data.num_classes(), {});
    for (int i = 0; i < data.size(); ++i) {
      for (int k = 0; k < data.num_classes(); ++k) {
        if (data.labels(i, k) == 1.0) {
          groups[k].push_back(i);
          break;
        }
      }
    }
  } else {
    groups.emplace_back(data.size());
    for (int i = 0; i < data.size(); ++i) groups[0][i] = i;
  }

  std::vector<int> train_idx, val_idx, test_idx;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const std::vector<int>& group = groups[gi];
    Rng g = rng.derive(gi);
    const std::vector<int> perm = g.permutation(static_cast<int>(group.size()));
    const long n = static_cast<long>(group.size());
    const long b1 = std::lround(n * train_frac);
    const long b2 = std::lround(n * (train_frac + val_frac));
    for (long i = 0; i < n; ++i) {
      const int idx = group[perm[i]];
      if (i < b1) train_idx.push_back(idx);
      else if (i < b2) val_idx.push_back(idx);
      else test_idx.push_back(idx);
    }
  }

  auto gather = [&](const std::vector<int>& idx, std::uint64_t stream) {
    Rng g = rng.derive(1000 + stream);
    std::vector<int> shuffled = idx;
    const std::vector<int> perm = g.permutation(static_cast<int>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) shuffled[i] = idx[perm[i]];
    Dataset out;
    out.mode = data.mode;
    out.name = data.name;
    out.provenance = data.provenance;
    out.features = Matrix(static_cast<int>(shuffled.size()), data.feature_dim());
    out.labels = Matrix(static_cast<int>(shuffled.size()), data.num_classes());
    for (std::size_t i = 0; i < shuffled.size(); ++i) {
      for (int d = 0; d < data.feature_dim(); ++d)
        out.features(static_cast<int>(i), d) = data.features(shuffled[i], d);
      for (int k = 0; k < data.num_classes(); ++k)
        out.labels(static_cast<int>(i), k) = data.labels(shuffled[i], k);
    }
    return out;
  };

  SplitResult res;
  res.train = gather(train_idx, 0);
  res.validation = gather(val_idx, 1);
  res.test = gather(test_idx, 2);
  return res;
}

}  // namespace bootnet
