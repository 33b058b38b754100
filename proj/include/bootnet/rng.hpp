#ifndef BOOTNET_RNG_HPP_
#define BOOTNET_RNG_HPP_

#include <cstdint>
#include <vector>

namespace bootnet {

/// Deterministic random stream built on the SplitMix64 generator
/// (Steele, Lea & Flood; the java.util.SplittableRandom mixer).
/// The state is a 64-bit counter advanced by the golden-ratio increment
/// and hashed through two multiply-xorshift rounds per draw, so equal
/// seeds give bit-identical sequences everywhere integers are exact.
/// Uniform doubles take the top 53 bits; Gaussians use the Marsaglia
/// polar transform; bounded integers use rejection sampling.
///
/// Single-owner by contract: never share one Rng across threads. Use
/// derive() to split independent child streams for parallel work.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53 random bits.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// N(0, sigma^2) via the polar method; one spare is cached.
  double next_gaussian(double sigma);

  /// Unbiased integer in [0, bound); bound must be positive.
  std::uint64_t next_below(std::uint64_t bound);

  std::vector<double> uniforms(int n);
  std::vector<double> gaussians(int n, double sigma);

  /// Fisher-Yates; uniform over all n! permutations of 0..n-1.
  std::vector<int> permutation(int n);

  /// Independent child stream keyed on (seed, stream_id).
  Rng derive(std::uint64_t stream_id) const;

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bootnet

#endif  // BOOTNET_RNG_HPP_
