// Benchmark: serial reference kernels vs the parallel kernels used on the
// training path, with a parity check on every size.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bootnet/kernels.hpp"
#include "bootnet/reference.hpp"
#include "bootnet/rng.hpp"

using namespace bootnet;

namespace {

Matrix random_matrix(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.next_gaussian(1.0);
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::fabs(a.data()[i] - b.data()[i]));
  }
  return d;
}

template <typename F>
double time_ms(F&& f, int repeats) {
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < repeats; ++i) f();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / repeats;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled (serial build)\n");
#endif
  std::printf("%-22s %12s %12s %9s %10s\n", "matmul size", "reference ms", "kernel ms",
              "speedup", "max |diff|");

  struct Case {
    int m, k, n;
    int repeats;
  };
  const Case cases[] = {
      {100, 784, 500, 20}, {100, 500, 300, 40}, {100, 300, 10, 100},
      {256, 256, 256, 20}, {512, 512, 512, 5},
  };

  Rng rng(99);
  for (const Case& c : cases) {
    const Matrix a = random_matrix(rng, c.m, c.k);
    const Matrix b = random_matrix(rng, c.k, c.n);
    Matrix out_ref, out_fast;
    const double t_ref = time_ms([&] { out_ref = reference::matmul(a, b); }, c.repeats);
    const double t_fast = time_ms([&] { out_fast = matmul(a, b); }, c.repeats);
    const double gflops = 2.0 * c.m * c.k * c.n / (t_fast * 1e6);
    std::printf("%4dx%-4dx%-11d %12.3f %12.3f %8.2fx %10.2e  (%.2f GFLOP/s)\n", c.m, c.k,
                c.n, t_ref, t_fast, t_ref / t_fast, max_abs_diff(out_ref, out_fast), gflops);
  }

  std::printf("\n%-22s %12s %12s %9s %10s\n", "softmax rows", "reference ms", "kernel ms",
              "speedup", "max |diff|");
  const Matrix z = random_matrix(rng, 10000, 10);
  Matrix s_ref, s_fast;
  const double t_ref = time_ms([&] { s_ref = reference::softmax_rows(z, 1.0); }, 50);
  const double t_fast = time_ms([&] { s_fast = softmax_rows(z, 1.0); }, 50);
  std::printf("%-22s %12.3f %12.3f %8.2fx %10.2e\n", "10000x10", t_ref, t_fast,
              t_ref / t_fast, max_abs_diff(s_ref, s_fast));
  return 0;
}
