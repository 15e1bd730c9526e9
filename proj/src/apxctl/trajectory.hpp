#pragma once

#include "apxctl/forcing.hpp"
#include "apxctl/spectral.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <ostream>
#include <vector>

namespace apxctl {

/// Which one-sided limit a query at a jump time returns.
enum class Side { left, right };

/// Piecewise-continuous solution on [-r, end]. Stored nodes start at t = 0;
/// queries before 0 are answered by the initial history. `states()[i]` is the
/// right limit at node i; jumps keep the matching left limit.
/// Per-node magnitudes of the perturbation terms ||b F|| and ||a memory||.
struct NodeDiagnostics {
  double nonlinear = 0.0;
  double memory = 0.0;
};

class Trajectory {
 public:
  struct Jump {
    std::size_t node = 0;
    double time = 0.0;
    Eigen::VectorXd left;
    Eigen::VectorXd right;
  };

  using Diagnostics = NodeDiagnostics;

  Trajectory(BasisPtr basis, double delay, InitialHistory history, double history_step);

  void append(double t, Eigen::VectorXd state, Diagnostics diagnostics = {});
  /// Applies a jump at the most recent node: its stored value becomes the
  /// right limit and the previous value is kept as the left limit.
  void record_jump(Eigen::VectorXd right);

  const BasisPtr& basis() const noexcept { return basis_; }
  double delay() const noexcept { return delay_; }
  const InitialHistory& initial_history() const noexcept { return history_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<Eigen::VectorXd>& states() const noexcept { return states_; }
  const std::vector<Jump>& jumps() const noexcept { return jumps_; }
  const std::vector<Diagnostics>& diagnostics() const noexcept { return diagnostics_; }
  std::size_t size() const noexcept { return times_.size(); }
  double start_time() const noexcept { return -delay_; }
  double end_time() const { return times_.back(); }

  /// Left limit at node i (equal to the stored state away from jumps).
  const Eigen::VectorXd& left_state(std::size_t i) const;
  /// z(t) with one-sided limits at jump times; Phi(t) for t <= 0.
  Eigen::VectorXd value(double t, Side side = Side::left) const;
  StateVector state_at(double t, Side side = Side::left) const {
    return StateVector(basis_, value(t, side));
  }
  StateVector final_state() const { return StateVector(basis_, states_.back()); }

  /// Running value of int_0^end M(end, s, z_s) ds left by the integrator.
  const Eigen::VectorXd& memory_accumulator() const noexcept { return memory_; }
  void set_memory_accumulator(Eigen::VectorXd memory) { memory_ = std::move(memory); }

  /// time,jump_flag,mode columns; history samples on [-r, 0), then nodes.
  /// Jumps appear as an L row followed by an R row at the same time.
  void write_csv(std::ostream& out) const;

 private:
  std::ptrdiff_t node_index(double t) const;  // -1 when t is not a node

  BasisPtr basis_;
  double delay_;
  InitialHistory history_;
  double history_step_;
  std::vector<double> times_;
  std::vector<Eigen::VectorXd> states_;
  std::vector<Diagnostics> diagnostics_;
  std::vector<Jump> jumps_;
  std::vector<std::ptrdiff_t> jump_of_node_;  // index into jumps_ or -1
  Eigen::VectorXd memory_;
};

/// z_t(s) = z(t + s), s in [-r, 0].
StateVector evaluate_history(const Trajectory& traj, double t, double s, Side side = Side::left);

/// Relative tolerance under which two times are the same grid node.
inline double time_tolerance(double t) { return 1e-11 * (1.0 + (t < 0 ? -t : t)); }

}  // namespace apxctl
