#include "bootnet/rng.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bootnet {

double Rng::next_gaussian(double sigma) {
  if (has_spare_) {
    has_spare_ = false;
    return spare_ * sigma;
  }
  double u, v, s;
  do {
    u = 2.0 * next_uniform() - 1.0;
    v = 2.0 * next_uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m * sigma;
}

std::uint64_t Rng::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::next_below: bound must be positive");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

std::vector<double> Rng::uniforms(int n) {
  if (n < 0) throw std::invalid_argument("Rng::uniforms: n must be nonnegative");
  std::vector<double> out(n);
  for (double& x : out) x = next_uniform();
  return out;
}

std::vector<double> Rng::gaussians(int n, double sigma) {
  if (n < 0) throw std::invalid_argument("Rng::gaussians: n must be nonnegative");
  std::vector<double> out(n);
  for (double& x : out) x = next_gaussian(sigma);
  return out;
}

std::vector<int> Rng::permutation(int n) {
  if (n < 0) throw std::invalid_argument("Rng::permutation: n must be nonnegative");
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(p[i], p[j]);
  }
  return p;
}

Rng Rng::derive(std::uint64_t stream_id) const {
  // Hash (seed, stream_id) into a child seed through the same mixer.
  Rng h(seed_ ^ (0xD1B54A32D192ED03ull * (stream_id + 1)));
  h.next_u64();
  return Rng(h.next_u64());
}

}  // namespace bootnet
