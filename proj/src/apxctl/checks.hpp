#pragma once

// Invariant suites run by the `check` verb. Each entry compares a measured
// defect against a fixed tolerance; the suite fails if any entry fails.

#include "apxctl/config.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace apxctl {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured defect (or indicator)
  double tolerance = 0.0;
  std::string detail;
};

struct CheckSuiteResult {
  std::vector<CheckResult> results;
  bool all_passed() const;
  std::size_t failures() const;
};

CheckSuiteResult run_check_suite(const ExperimentConfig& cfg);

/// Platform-independent uniform draws from a fixed seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo = -1.0, double hi = 1.0) {
    return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  Eigen::VectorXd vector(Eigen::Index n, double lo = -1.0, double hi = 1.0) {
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = uniform(lo, hi);
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

/// int <u(s), B* T(tau - s) z> ds over the window, with u the piecewise linear
/// interpolant of the signal and the adjoint evaluated in closed form at
/// 5-point Gauss nodes of every panel.
double l2_pairing_with_adjoint(const ControlContext& ctx, const ControlSignal& u, const StateVector& z);

/// Window grid on which G u_alpha matches the regularized identity to about
/// `tolerance` relative: panel length h with h^2 lambda_max^2 / 12 <= tolerance / 2.
std::size_t identity_panels(const SpectralBasis& basis, const TimeWindow& window, double tolerance);

}  // namespace apxctl
