#include "apxctl/quadrature.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace apxctl;

TEST_CASE("quadrature: exponential trapezoid weights match direct integrals") {
  for (double h : {1e-3, 0.05, 0.3}) {
    for (double lambda : {0.0, 1e-4, 1.0, 1.6, 1.7, 10.0, 256.0, 1024.0}) {
      const auto w = exp_trapezoid_weights(lambda, h);
      // u = 1 - s / h, split geometrically so the boundary layer at u = 0 is resolved
      const double x = lambda * h;
      const double tol = 1e-14 / std::max(1.0, x * x);
      double left = 0.0, right = 0.0;
      for (double a = 0.0, c = std::min(1.0, 1.0 / std::max(x, 1.0)); a < 1.0; a = c, c = std::min(1.0, 2.0 * c)) {
        left += h * oracle::integrate([&](double u) { return std::exp(-x * u) * u; }, a, c, tol);
        right += h * oracle::integrate([&](double u) { return std::exp(-x * u) * (1.0 - u); }, a, c, tol);
      }
      CAPTURE(h);
      CAPTURE(lambda);
      CHECK(w.left == doctest::Approx(left).epsilon(1e-11).scale(0.0));
      CHECK(w.right == doctest::Approx(right).epsilon(1e-11).scale(0.0));
    }
  }
}

TEST_CASE("quadrature: weights are continuous across the series switch") {
  const double h = 1.0;
  const double below = std::nextafter(0.5, 0.0), above = 0.5;
  const auto a = exp_trapezoid_weights(below, h);
  const auto b = exp_trapezoid_weights(above, h);
  CHECK(std::abs(a.left - b.left) <= 1e-15);
  CHECK(std::abs(a.right - b.right) <= 1e-15);
  const auto zero = exp_trapezoid_weights(0.0, 0.2);
  CHECK(zero.left == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(zero.right == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("quadrature: rule is exact for affine data") {
  const double lambda = 3.7, h = 0.4, c0 = 1.3, c1 = -2.1;
  const auto w = exp_trapezoid_weights(lambda, h);
  const double exact = oracle::integrate([&](double s) { return std::exp(-lambda * (h - s)) * (c0 + c1 * s); }, 0.0, h);
  CHECK(w.left * c0 + w.right * (c0 + c1 * h) == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("quadrature: panel weight cache agrees with direct evaluation") {
  Eigen::ArrayXd lambda(3);
  lambda << 1.0, 4.0, 9.0;
  PanelWeights cache(lambda);
  for (int round = 0; round < 3; ++round)
    for (double h : {0.01, 0.02, 0.010000000000000002, 0.5}) {
      const auto& set = cache(h);
      for (Eigen::Index i = 0; i < 3; ++i) {
        const auto w = exp_trapezoid_weights(lambda[i], h);
        CHECK(set.left[i] == w.left);
        CHECK(set.right[i] == w.right);
        CHECK(set.decay[i] == std::exp(-lambda[i] * h));
      }
    }
}

TEST_CASE("quadrature: 5-point Gauss-Legendre is exact through degree 9") {
  for (int degree = 0; degree <= 9; ++degree) {
    double sum = 0.0;
    for (std::size_t q = 0; q < 5; ++q) sum += GaussLegendre5::weights[q] * std::pow(GaussLegendre5::nodes[q], degree);
    const double exact = degree % 2 ? 0.0 : 2.0 / (degree + 1);
    CHECK(sum == doctest::Approx(exact).epsilon(1e-15).scale(1.0));
  }
}
