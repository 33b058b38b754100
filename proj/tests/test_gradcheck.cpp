#include <cmath>

#include "bootnet/gradcheck.hpp"
#include "doctest.h"

using namespace bootnet;

TEST_SUITE("gradcheck") {

TEST_CASE("quadratic gradient") {
  Matrix x{{1.0, 2.0}};
  const Matrix g = finite_diff_grad(
      [](const Matrix& m) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) s += m.data()[i] * m.data()[i];
        return s;
      },
      x, 1e-5);
  CHECK(g(0, 0) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(g(0, 1) == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("constant function has zero gradient") {
  Matrix x{{0.3, -0.7}, {1.5, 0.0}};
  const Matrix g = finite_diff_grad([](const Matrix&) { return 4.2; }, x);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::fabs(g.data()[i]) <= 1e-9);
}

TEST_CASE("probe does not mutate the input") {
  Matrix x{{1.0, 2.0}};
  const Matrix copy = x;
  (void)finite_diff_grad([](const Matrix& m) { return m(0, 0) * m(0, 1); }, x);
  CHECK(x == copy);
}

TEST_CASE("rejects non-positive eps") {
  Matrix x(1, 1);
  CHECK_THROWS_AS(finite_diff_grad([](const Matrix&) { return 0.0; }, x, 0.0),
                  std::invalid_argument);
}

TEST_CASE("rel error scale: equal gradients score zero") {
  Matrix a{{0.5, -0.25}};
  CHECK(gradient_rel_error(a, a) == 0.0);
  Matrix b{{0.5, -0.2501}};
  CHECK(gradient_rel_error(a, b) == doctest::Approx(0.0001 / 0.5).epsilon(1e-6));
}

}  // TEST_SUITE
