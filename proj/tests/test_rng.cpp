#include <algorithm>
#include <cmath>
#include <map>

#include "bootnet/rng.hpp"
#include "doctest.h"

using namespace bootnet;

TEST_SUITE("rng") {

TEST_CASE("same seed gives identical sequences") {
  Rng a(123456789), b(123456789);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(42), d(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(c.next_uniform() == d.next_uniform());
    CHECK(c.next_gaussian(2.0) == d.next_gaussian(2.0));
  }
  CHECK(c.permutation(50) == d.permutation(50));
}

TEST_CASE("different seeds diverge") {
  Rng a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a.next_u64() == b.next_u64();
  CHECK(equal == 0);
}

TEST_CASE("uniforms live in [0,1) and concentrate around 1/2") {
  Rng rng(7);
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  const double mean = sum / n;
  CHECK(mean >= 0.499);
  CHECK(mean <= 0.501);
}

TEST_CASE("gaussian sample std tracks sigma") {
  Rng rng(8);
  const int n = 200000;
  const double sigma = 2.5;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.next_gaussian(sigma);
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / n;
  const double std_dev = std::sqrt(sum_sq / n - mean * mean);
  CHECK(std::fabs(mean) <= 0.02);
  CHECK(std_dev == doctest::Approx(sigma).epsilon(0.02));
}

TEST_CASE("permutation basics") {
  Rng rng(9);
  CHECK(rng.permutation(1) == std::vector<int>{0});
  CHECK(rng.permutation(0).empty());
  const auto p = rng.permutation(100);
  std::vector<char> seen(100, 0);
  for (int v : p) {
    REQUIRE(v >= 0);
    REQUIRE(v < 100);
    REQUIRE_FALSE(seen[v]);
    seen[v] = 1;
  }
}

TEST_CASE("permutations are roughly uniform over n=3") {
  Rng rng(10);
  std::map<std::vector<int>, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) counts[rng.permutation(3)]++;
  CHECK(counts.size() == 6);
  for (const auto& [perm, count] : counts) {
    CHECK(count > draws / 6 * 0.93);
    CHECK(count < draws / 6 * 1.07);
  }
}

TEST_CASE("bounded draws are unbiased-ish and in range") {
  Rng rng(11);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) counts[rng.next_below(7)]++;
  for (int c : counts) {
    CHECK(c > 10000 * 0.93);
    CHECK(c < 10000 * 1.07);
  }
  CHECK_THROWS(rng.next_below(0));
}

TEST_CASE("derived streams are independent of parent draws") {
  Rng parent(77);
  const Rng child_before = parent.derive(3);
  parent.next_u64();
  parent.next_u64();
  const Rng child_after = parent.derive(3);
  Rng a = child_before, b = child_after;
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng c = parent.derive(4);
  Rng d = parent.derive(5);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += c.next_u64() == d.next_u64();
  CHECK(equal == 0);
}

}  // TEST_SUITE
