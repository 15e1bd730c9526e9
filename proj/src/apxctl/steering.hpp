#pragma once

// Two-phase steering: any control u on [0, tau - delta], then the regularized
// Gramian control on the terminal window [tau - delta, tau]. With delta < r
// every delayed lookup made during the window reads the phase-1 trajectory,
// so the nonlinear terms there do not depend on alpha.

#include "apxctl/dynamics.hpp"
#include "apxctl/gramian.hpp"

#include <optional>
#include <vector>

namespace apxctl {

struct SteeringConfig {
  std::vector<double> deltas;
  std::vector<double> alphas;
  double epsilon = 1e-2;
  ControlFn base_control;
  StateVector target;
  IntegratorOptions integrator;
  bool keep_trajectories = false;
  /// Test-only: allow delta >= r for the negative-control experiment.
  bool enforce_delay_window = true;

  void validate(const ProblemSpec& spec) const;
  std::vector<std::string> violations(const ProblemSpec& spec) const;
};

/// 0 < delta < min(r, tau - t_p), the delay part skippable for tests.
void validate_delta(const ProblemSpec& spec, double delta, bool enforce_delay_window = true);

struct SteeringCell {
  double delta = 0.0;
  double alpha = 0.0;
  Eigen::VectorXd final_state;       // z^{delta,alpha}(tau)
  Eigen::VectorXd comparison_state;  // y^{delta,alpha}(tau)
  double final_error = 0.0;          // ||z(tau) - z1||
  double gap_nl = 0.0;               // ||z(tau) - y(tau)||
  double gap_lin = 0.0;              // ||y(tau) - z1||
  double predicted_gap_lin = 0.0;    // ||alpha (alpha I + Q)^{-1} w||
  double pullback_residual = 0.0;
  double window_bound = 0.0;         // delta * sup_window(||b F|| + ||a memory||)
  double final_error_beta_half = 0.0;
  bool accepted = false;
  std::optional<Trajectory> steered;
};

struct ErrorSplit {
  double gap_nl = 0.0;
  double gap_lin = 0.0;
  double total = 0.0;
  bool triangle_holds = false;
};

/// Shared work for one delta: phase 1, the base continuation, the window grid
/// and the Gramian. Cells for different alpha reuse it.
class TwoPhaseRunner {
 public:
  TwoPhaseRunner(const ProblemSpec& spec, const SteeringConfig& cfg, double delta);

  SteeringCell run(double alpha) const;

  double delta() const noexcept { return delta_; }
  const Trajectory& phase1() const noexcept { return phase1_; }
  /// z(t, 0, Phi, u) with the base control on all of [0, tau].
  const Trajectory& base() const noexcept { return base_; }
  const GramianMatrix& gramian() const noexcept { return gramian_; }
  const std::vector<double>& window_grid() const noexcept { return window_grid_; }
  const ControlContext& context() const noexcept { return context_; }

 private:
  const ProblemSpec* spec_;
  const SteeringConfig* cfg_;
  double delta_;
  Trajectory phase1_;
  Trajectory base_;
  std::vector<double> window_grid_;
  ControlContext context_;
  GramianMatrix gramian_;
};

SteeringCell run_two_phase(const ProblemSpec& spec, const SteeringConfig& cfg, double delta, double alpha);

/// y(tau) = T(delta) y0 + G u_alpha.
StateVector linear_comparison(const ControlContext& ctx, const StateVector& y0, const ControlSignal& control);

/// sup over window nodes s of ||z_steered(s - r) - z_base(s - r)||, both limits.
double pullback_check(const Trajectory& base, const Trajectory& steered, double delta, double delay);

ErrorSplit error_decomposition(const SteeringCell& cell);

struct SweepResult {
  std::vector<SteeringCell> cells;  // delta-major, ladder order
  std::vector<double> deltas;
  std::vector<double> alphas;
  double epsilon = 0.0;
  std::optional<std::size_t> best;  // smallest final error
  std::size_t accepted_count() const;
};

SweepResult sweep(const ProblemSpec& spec, const SteeringConfig& cfg, unsigned jobs = 1);

}  // namespace apxctl
