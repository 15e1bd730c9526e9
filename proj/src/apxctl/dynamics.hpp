#pragma once

// Method-of-steps integration of the impulsive semilinear delay system
//   z' = -A z + B u + a int_0^t M(t, s, z_s) ds + b F(t, z_t, u),
//   z(s) = Phi(s) on [-r, 0],  z(t_k^+) = z(t_k^-) + I_k(t_k, z(t_k^-), u(t_k)),
// through its mild (variation-of-constants) form. Each mode is advanced by the
// exponential trapezoid rule, so the homogeneous part is propagated exactly.

#include "apxctl/control_operator.hpp"
#include "apxctl/forcing.hpp"
#include "apxctl/spectral.hpp"
#include "apxctl/trajectory.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace apxctl {

struct ProblemSpec {
  BasisPtr basis;
  double memory_gain = 0.0;     // a
  double nonlinear_gain = 0.0;  // b
  double delay = 1.0;           // r
  double horizon = 1.0;         // tau
  std::vector<ImpulseMap> impulses;
  Nonlinearity nonlinearity;
  MemoryKernel memory;
  ControlOperator control;
  InitialHistory history;
  GrowthBound growth;

  /// Throws Error(validation) listing every violated precondition.
  void validate() const;
  std::vector<std::string> violations() const;
  /// t_p, or 0 without impulses.
  double last_impulse_time() const;
  bool is_linear() const;
};

using ControlFn = std::function<Eigen::VectorXd(double)>;

ControlFn zero_control(std::size_t control_dim);
ControlFn constant_control(Eigen::VectorXd value);

struct IntegratorOptions {
  int steps_per_delay = 200;  // h = r / steps_per_delay
  std::vector<double> extra_breakpoints;
};

double step_size(const ProblemSpec& spec, const IntegratorOptions& options);

/// Times inside (t0, t1) where the solution or its forcing may be
/// discontinuous: impulse times and their delay translates, plus the
/// translates n r of the history junction at 0.
std::vector<double> problem_breakpoints(const ProblemSpec& spec, double t0, double t1);

/// Grid on [t0, t1]: every breakpoint is a node and each segment between
/// breakpoints is split into equal panels of length <= h.
std::vector<double> integration_grid(const ProblemSpec& spec, const IntegratorOptions& options,
                                     double t0, double t1);

/// Integrates the mild solution over [t0, t1]. Without `incoming` the run
/// starts from Phi at t0 = 0; otherwise the incoming trajectory, which must end
/// at t0, is extended (its nodes are copied unchanged).
Trajectory integrate_mild(const ProblemSpec& spec, const ControlFn& control, double t0, double t1,
                          const Trajectory* incoming, const IntegratorOptions& options = {});

/// Composite trapezoid value of int_0^t M(t, s, z_s) ds over the stored grid,
/// panels split at jump-induced discontinuities. Independent of the running
/// accumulator the integrator keeps.
Eigen::VectorXd memory_integral(double t, const Trajectory& traj, const ProblemSpec& spec);

}  // namespace apxctl
