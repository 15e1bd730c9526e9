#pragma once

// Catalog of the nonlinear ingredients of the impulsive delay system: the
// delayed nonlinearity F, the Volterra memory kernel M, the impulse maps I_k,
// and the initial history Phi. Every catalog entry depends on history only
// through the strictly delayed value z(t - r).

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace apxctl {

class Nonlinearity {
 public:
  enum class Kind { zero, delayed_sigmoid, delayed_power };

  Nonlinearity() = default;
  static Nonlinearity zero() { return {}; }
  /// scale * tanh(xi) coefficient-wise.
  static Nonlinearity delayed_sigmoid(double scale = 1.0);
  /// sign(xi) * min(|xi|^exponent, cap) coefficient-wise.
  static Nonlinearity delayed_power(double exponent, double cap);

  Kind kind() const noexcept { return kind_; }
  double scale() const noexcept { return scale_; }
  double exponent() const noexcept { return exponent_; }
  double cap() const noexcept { return cap_; }
  bool is_zero() const noexcept { return kind_ == Kind::zero; }

  /// F(t, z_t, u) evaluated from delayed = z(t - r). Time and control are
  /// accepted for signature fidelity; catalog entries ignore them.
  Eigen::VectorXd operator()(double t, const Eigen::VectorXd& delayed,
                             const Eigen::VectorXd& control) const;

  std::string tag() const;
  static Nonlinearity from_tag(const std::string& tag, double scale, double exponent, double cap);

 private:
  Kind kind_ = Kind::zero;
  double scale_ = 1.0;
  double exponent_ = 1.0;
  double cap_ = 1.0;
};

/// M(t, s, z_s) = exp(-rate (t - s)) * tanh(z(s - r)), or with the raw
/// delayed value in place of tanh when `saturate` is off. The separable
/// exponential weight lets the integrator carry the memory integral forward
/// with one multiply per step.
class MemoryKernel {
 public:
  enum class Kind { zero, exp_kernel };

  MemoryKernel() = default;
  static MemoryKernel zero() { return {}; }
  static MemoryKernel exp_kernel(double rate = 1.0, bool saturate = true);

  Kind kind() const noexcept { return kind_; }
  double rate() const noexcept { return rate_; }
  bool saturates() const noexcept { return saturate_; }
  bool is_zero() const noexcept { return kind_ == Kind::zero; }

  double weight(double t, double s) const;
  Eigen::VectorXd integrand_state(const Eigen::VectorXd& delayed) const;
  Eigen::VectorXd operator()(double t, double s, const Eigen::VectorXd& delayed) const {
    return weight(t, s) * integrand_state(delayed);
  }

  std::string tag() const;
  static MemoryKernel from_tag(const std::string& tag, double rate);

 private:
  Kind kind_ = Kind::zero;
  double rate_ = 1.0;
  bool saturate_ = true;
};

class ImpulseMap {
 public:
  enum class Kind { fixed, proportional };

  static ImpulseMap fixed(double time, Eigen::VectorXd jump);
  /// gain * tanh(z(t_k^-)) coefficient-wise.
  static ImpulseMap proportional(double time, double gain);

  Kind kind() const noexcept { return kind_; }
  double time() const noexcept { return time_; }
  double gain() const noexcept { return gain_; }
  const Eigen::VectorXd& jump() const noexcept { return jump_; }

  /// I_k(t_k, z(t_k^-), u(t_k)); a fixed jump shorter than the state is
  /// zero-padded.
  Eigen::VectorXd operator()(const Eigen::VectorXd& left, const Eigen::VectorXd& control) const;

  std::string tag() const { return kind_ == Kind::fixed ? "fixed" : "proportional"; }

 private:
  Kind kind_ = Kind::fixed;
  double time_ = 0.0;
  double gain_ = 0.0;
  Eigen::VectorXd jump_;
};

/// rho(xi) = coefficient * xi^exponent + offset.
struct GrowthBound {
  double coefficient = 1.0;
  double exponent = 1.0;
  double offset = 0.0;

  double operator()(double xi) const;
  bool valid() const { return coefficient > 0.0 && exponent >= 1.0 && offset >= 0.0; }
};

struct GrowthSample {
  double time = 0.0;
  Eigen::VectorXd delayed;  // Phi(-r) of the history segment
  Eigen::VectorXd control;
};

struct GrowthReport {
  bool holds = true;
  double min_slack = 0.0;  // min over samples of rho(||delayed||) - ||F||
  double max_slack = 0.0;
  std::vector<GrowthSample> violations;
};

GrowthReport growth_bound_check(const Nonlinearity& f, const GrowthBound& bound,
                                std::span<const GrowthSample> samples);

/// Phi on [-r, 0]: a spatial profile times a temporal shape.
class InitialHistory {
 public:
  enum class Shape { constant, ramp };

  InitialHistory() = default;
  InitialHistory(Eigen::VectorXd profile, Shape shape, double delay);

  /// constant: Phi(s) = profile; ramp: Phi(s) = profile * (1 + s / (2 r)).
  Eigen::VectorXd operator()(double s) const;

  const Eigen::VectorXd& profile() const noexcept { return profile_; }
  Shape shape() const noexcept { return shape_; }
  std::string shape_tag() const { return shape_ == Shape::constant ? "constant" : "ramp"; }

 private:
  Eigen::VectorXd profile_;
  Shape shape_ = Shape::constant;
  double delay_ = 1.0;
};

}  // namespace apxctl
