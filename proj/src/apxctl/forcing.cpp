#include "apxctl/forcing.hpp"

#include "apxctl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace apxctl {

Nonlinearity Nonlinearity::delayed_sigmoid(double scale) {
  require(std::isfinite(scale), "sigmoid scale must be finite");
  Nonlinearity f;
  f.kind_ = Kind::delayed_sigmoid;
  f.scale_ = scale;
  return f;
}

Nonlinearity Nonlinearity::delayed_power(double exponent, double cap) {
  require(exponent >= 1.0, "power nonlinearity exponent must be >= 1");
  require(cap > 0.0 && std::isfinite(cap), "power nonlinearity cap must be positive");
  Nonlinearity f;
  f.kind_ = Kind::delayed_power;
  f.exponent_ = exponent;
  f.cap_ = cap;
  return f;
}

Eigen::VectorXd Nonlinearity::operator()(double, const Eigen::VectorXd& delayed,
                                         const Eigen::VectorXd&) const {
  switch (kind_) {
    case Kind::zero:
      return Eigen::VectorXd::Zero(delayed.size());
    case Kind::delayed_sigmoid:
      return scale_ * delayed.array().tanh().matrix();
    case Kind::delayed_power: {
      Eigen::VectorXd out(delayed.size());
      for (Eigen::Index i = 0; i < delayed.size(); ++i) {
        const double x = delayed[i];
        const double magnitude = std::min(std::pow(std::abs(x), exponent_), cap_);
        out[i] = std::copysign(magnitude, x);
      }
      return out;
    }
  }
  fail(ErrorKind::internal, "unhandled nonlinearity kind");
}

std::string Nonlinearity::tag() const {
  switch (kind_) {
    case Kind::zero: return "F_zero";
    case Kind::delayed_sigmoid: return "F_delayed_sigmoid";
    case Kind::delayed_power: return "F_delayed_power";
  }
  return "F_zero";
}

Nonlinearity Nonlinearity::from_tag(const std::string& tag, double scale, double exponent, double cap) {
  if (tag == "F_zero") return zero();
  if (tag == "F_delayed_sigmoid") return delayed_sigmoid(scale);
  if (tag == "F_delayed_power") return delayed_power(exponent, cap);
  fail(ErrorKind::validation, "unknown nonlinearity tag '" + tag + "'");
}

MemoryKernel MemoryKernel::exp_kernel(double rate, bool saturate) {
  require(rate >= 0.0 && std::isfinite(rate), "memory kernel rate must be nonnegative");
  MemoryKernel m;
  m.kind_ = Kind::exp_kernel;
  m.rate_ = rate;
  m.saturate_ = saturate;
  return m;
}

double MemoryKernel::weight(double t, double s) const {
  return kind_ == Kind::zero ? 0.0 : std::exp(-rate_ * (t - s));
}

Eigen::VectorXd MemoryKernel::integrand_state(const Eigen::VectorXd& delayed) const {
  if (kind_ == Kind::zero) return Eigen::VectorXd::Zero(delayed.size());
  if (!saturate_) return delayed;
  return delayed.array().tanh().matrix();
}

std::string MemoryKernel::tag() const { return kind_ == Kind::zero ? "M_zero" : "M_exp_kernel"; }

MemoryKernel MemoryKernel::from_tag(const std::string& tag, double rate) {
  if (tag == "M_zero") return zero();
  if (tag == "M_exp_kernel") return exp_kernel(rate);
  fail(ErrorKind::validation, "unknown memory kernel tag '" + tag + "'");
}

ImpulseMap ImpulseMap::fixed(double time, Eigen::VectorXd jump) {
  require(jump.allFinite(), "impulse jump vector must be finite");
  ImpulseMap map;
  map.kind_ = Kind::fixed;
  map.time_ = time;
  map.jump_ = std::move(jump);
  return map;
}

ImpulseMap ImpulseMap::proportional(double time, double gain) {
  require(std::isfinite(gain), "impulse gain must be finite");
  ImpulseMap map;
  map.kind_ = Kind::proportional;
  map.time_ = time;
  map.gain_ = gain;
  return map;
}

Eigen::VectorXd ImpulseMap::operator()(const Eigen::VectorXd& left, const Eigen::VectorXd&) const {
  if (kind_ == Kind::proportional) return gain_ * left.array().tanh().matrix();
  require(jump_.size() <= left.size(), "impulse jump vector longer than the state");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(left.size());
  out.head(jump_.size()) = jump_;
  return out;
}

double GrowthBound::operator()(double xi) const { return coefficient * std::pow(xi, exponent) + offset; }

GrowthReport growth_bound_check(const Nonlinearity& f, const GrowthBound& bound,
                                std::span<const GrowthSample> samples) {
  require(bound.valid(), "growth bound needs e > 0, exponent >= 1, eta >= 0");
  GrowthReport report;
  report.min_slack = std::numeric_limits<double>::infinity();
  report.max_slack = -std::numeric_limits<double>::infinity();
  for (const auto& sample : samples) {
    const double value = f(sample.time, sample.delayed, sample.control).norm();
    const double rho = bound(sample.delayed.norm());
    const double slack = rho - value;
    report.min_slack = std::min(report.min_slack, slack);
    report.max_slack = std::max(report.max_slack, slack);
    if (slack < -1e-14 * std::max(1.0, rho)) {
      report.holds = false;
      report.violations.push_back(sample);
    }
  }
  if (samples.empty()) report.min_slack = report.max_slack = 0.0;
  return report;
}

InitialHistory::InitialHistory(Eigen::VectorXd profile, Shape shape, double delay)
    : profile_(std::move(profile)), shape_(shape), delay_(delay) {
  require(profile_.allFinite(), "initial history must be finite");
  require(delay_ > 0.0, "initial history needs a positive delay");
}

Eigen::VectorXd InitialHistory::operator()(double s) const {
  if (shape_ == Shape::constant) return profile_;
  return profile_ * (1.0 + s / (2.0 * delay_));
}

}  // namespace apxctl
