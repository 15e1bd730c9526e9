#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>

namespace apxctl {

/// Weights (w0, w1) of the exponential trapezoid rule
///   int_0^h exp(-lambda (h - s)) f(s) ds ~= w0 f(0) + w1 f(h)
/// with f replaced by its linear interpolant. Exact for affine f.
struct ExpTrapezoidWeights {
  double left = 0.0;
  double right = 0.0;
};

inline ExpTrapezoidWeights exp_trapezoid_weights(double lambda, double h) {
  const double x = lambda * h;
  // e1 = int_0^1 exp(-x v) dv, e2 = int_0^1 v exp(-x v) dv
  double e1 = 0.0;
  double e2 = 0.0;
  if (std::abs(x) < 0.5) {
    double term = 1.0;  // (-x)^n / n!
    for (int n = 0; n < 30; ++n) {
      e1 += term / (n + 1);
      e2 += term / (n + 2);
      term *= -x / (n + 1);
    }
  } else {
    const double decay = std::exp(-x);
    e1 = -std::expm1(-x) / x;
    e2 = (e1 - decay) / x;
  }
  return {h * e2, h * (e1 - e2)};
}

/// Per-mode weights and decay factors for a step h. Rounding makes an
/// equally spaced grid produce a few distinct step values, so the last
/// several are kept.
class PanelWeights {
 public:
  struct Set {
    double h = -1.0;
    Eigen::ArrayXd decay, left, right;
  };

  explicit PanelWeights(Eigen::ArrayXd lambda) : lambda_(std::move(lambda)) {}

  const Set& operator()(double h) {
    for (const auto& set : sets_)
      if (set.h == h) return set;
    Set& set = sets_[next_];
    next_ = (next_ + 1) % sets_.size();
    const auto m = lambda_.size();
    set.h = h;
    set.decay.resize(m);
    set.left.resize(m);
    set.right.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto w = exp_trapezoid_weights(lambda_[i], h);
      set.left[i] = w.left;
      set.right[i] = w.right;
      set.decay[i] = std::exp(-lambda_[i] * h);
    }
    return set;
  }

 private:
  Eigen::ArrayXd lambda_;
  std::array<Set, 8> sets_;
  std::size_t next_ = 0;
};

/// 5-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre5 {
  static constexpr std::array<double, 5> nodes = {
      -0.9061798459386639927976269, -0.5384693101056830910363144, 0.0,
      0.5384693101056830910363144, 0.9061798459386639927976269};
  static constexpr std::array<double, 5> weights = {
      0.2369268850561890875142640, 0.4786286704993664680412915, 0.5688888888888888888888889,
      0.4786286704993664680412915, 0.2369268850561890875142640};
};

}  // namespace apxctl
