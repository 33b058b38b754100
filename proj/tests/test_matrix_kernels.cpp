#include <cmath>
#include <stdexcept>

#include "bootnet/kernels.hpp"
#include "bootnet/reference.hpp"
#include "bootnet/rng.hpp"
#include "doctest.h"

using namespace bootnet;

namespace {

Matrix random_matrix(Rng& rng, int rows, int cols, double sigma = 1.0) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.next_gaussian(sigma);
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  REQUIRE(a.same_shape(b));
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::fabs(a.data()[i] - b.data()[i]));
  }
  return d;
}

}  // namespace

TEST_SUITE("matrix_kernels") {

TEST_CASE("identity times A is A") {
  Matrix a{{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}, {7.0, 8.0, 9.0}};
  const Matrix c = matmul(Matrix::identity(3), a);
  CHECK(max_abs_diff(c, a) == 0.0);
}

TEST_CASE("hand-checkable 2x2 product") {
  Matrix a{{1.0, 2.0}, {3.0, 4.0}};
  Matrix b{{1.0}, {1.0}};
  const Matrix c = matmul(a, b);
  CHECK(c(0, 0) == doctest::Approx(3.0));
  CHECK(c(1, 0) == doctest::Approx(7.0));
}

TEST_CASE("matmul matches the naive triple-loop oracle") {
  Rng rng(11);
  for (int it = 0; it < 5; ++it) {
    const int m = 1 + static_cast<int>(rng.next_below(40));
    const int k = 1 + static_cast<int>(rng.next_below(40));
    const int n = 1 + static_cast<int>(rng.next_below(40));
    const Matrix a = random_matrix(rng, m, k);
    const Matrix b = random_matrix(rng, k, n);
    CHECK(max_abs_diff(matmul(a, b), reference::matmul(a, b)) <= 1e-12);
  }
}

TEST_CASE("transpose-variant products match explicit transposes") {
  Rng rng(12);
  const Matrix a = random_matrix(rng, 17, 9);
  const Matrix b = random_matrix(rng, 17, 13);
  CHECK(max_abs_diff(matmul_at_b(a, b), matmul(transpose(a), b)) <= 1e-12);
  const Matrix c = random_matrix(rng, 13, 9);
  CHECK(max_abs_diff(matmul_a_bt(a, c), matmul(a, transpose(c))) <= 1e-12);
}

TEST_CASE("matmul associativity on random triples") {
  Rng rng(13);
  for (int it = 0; it < 3; ++it) {
    const Matrix a = random_matrix(rng, 8, 6);
    const Matrix b = random_matrix(rng, 6, 7);
    const Matrix c = random_matrix(rng, 7, 5);
    const Matrix left = matmul(matmul(a, b), c);
    const Matrix right = matmul(a, matmul(b, c));
    double scale = 0.0;
    for (std::size_t i = 0; i < left.size(); ++i) {
      scale = std::max(scale, std::fabs(left.data()[i]));
    }
    CHECK(max_abs_diff(left, right) / scale <= 1e-10);
  }
}

TEST_CASE("dimension mismatch raises invalid_argument") {
  Matrix a(2, 3), b(4, 2);
  CHECK_THROWS_AS(matmul(a, b), std::invalid_argument);
  CHECK_THROWS_AS(matmul_at_b(a, Matrix(3, 2)), std::invalid_argument);
  CHECK_THROWS_AS(matmul_a_bt(a, Matrix(2, 4)), std::invalid_argument);
}

TEST_CASE("softmax of a constant row is uniform") {
  Matrix z{{0.0, 0.0, 0.0}};
  const Matrix q = softmax_rows(z, 1.0);
  for (int j = 0; j < 3; ++j) CHECK(q(0, j) == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("softmax two-logit value e/(e+1)") {
  Matrix z{{1.0, 0.0}};
  const Matrix q = softmax_rows(z, 1.0);
  const double e = std::exp(1.0);
  CHECK(q(0, 0) == doctest::Approx(e / (e + 1.0)).epsilon(1e-9));
  CHECK(q(0, 1) == doctest::Approx(1.0 / (e + 1.0)).epsilon(1e-9));
}

TEST_CASE("large temperature selects the argmax") {
  Matrix z{{1.0, 0.9, 0.0}};
  const Matrix q = softmax_rows(z, 1000.0);
  CHECK(std::fabs(q(0, 0) - 1.0) <= 1e-6);
  CHECK(std::fabs(q(0, 1)) <= 1e-6);
  CHECK(std::fabs(q(0, 2)) <= 1e-6);
}

TEST_CASE("softmax rows sum to one and shift invariance holds") {
  Rng rng(14);
  const Matrix z = random_matrix(rng, 20, 7, 3.0);
  const Matrix q = softmax_rows(z, 1.0);
  for (int r = 0; r < q.rows(); ++r) {
    double sum = 0.0;
    for (int j = 0; j < q.cols(); ++j) sum += q(r, j);
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
  }
  Matrix shifted = z;
  for (int j = 0; j < shifted.cols(); ++j) shifted(3, j) += 17.5;
  const Matrix q2 = softmax_rows(shifted, 1.0);
  for (int j = 0; j < q.cols(); ++j) {
    CHECK(q2(3, j) == doctest::Approx(q(3, j)).epsilon(1e-12));
  }
}

TEST_CASE("softmax temperature equals pre-scaled logits exactly") {
  Rng rng(15);
  const Matrix z = random_matrix(rng, 9, 5, 2.0);
  const double t = 3.7;
  Matrix scaled = z;
  for (std::size_t i = 0; i < scaled.size(); ++i) scaled.data()[i] *= t;
  const Matrix a = softmax_rows(z, t);
  const Matrix b = softmax_rows(scaled, 1.0);
  CHECK(max_abs_diff(a, b) == 0.0);
}

TEST_CASE("softmax rejects non-positive temperature") {
  Matrix z(1, 2);
  CHECK_THROWS_AS(softmax_rows(z, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(softmax_rows(z, -1.0), std::invalid_argument);
}

TEST_CASE("kernel softmax matches the serial reference") {
  Rng rng(16);
  const Matrix z = random_matrix(rng, 50, 9, 4.0);
  CHECK(max_abs_diff(softmax_rows(z, 2.0), reference::softmax_rows(z, 2.0)) <= 1e-14);
}

TEST_CASE("matrix invariants and helpers") {
  CHECK_THROWS_AS(Matrix(-1, 2), std::invalid_argument);
  CHECK_THROWS_AS(Matrix({{1.0, 2.0}, {3.0}}), std::invalid_argument);
  Matrix m{{0.0, 1.0}};
  CHECK(m.all_finite());
  m(0, 1) = std::nan("");
  CHECK_FALSE(m.all_finite());
}

}  // TEST_SUITE
