#include "apxctl/trajectory.hpp"

#include "apxctl/error.hpp"
#include "apxctl/output.hpp"

#include <algorithm>
#include <cmath>

namespace apxctl {

Trajectory::Trajectory(BasisPtr basis, double delay, InitialHistory history, double history_step)
    : basis_(std::move(basis)), delay_(delay), history_(std::move(history)), history_step_(history_step) {
  require(basis_ != nullptr, "trajectory needs a basis");
  require(delay_ > 0.0, "trajectory needs a positive delay");
  require(history_step_ > 0.0, "history sampling step must be positive");
  memory_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis_->size()));
}

void Trajectory::append(double t, Eigen::VectorXd state, Diagnostics diagnostics) {
  require(static_cast<std::size_t>(state.size()) == basis_->size(), "state length mismatch");
  if (!times_.empty() && !(t > times_.back())) fail(ErrorKind::internal, "trajectory times must increase");
  times_.push_back(t);
  states_.push_back(std::move(state));
  diagnostics_.push_back(diagnostics);
  jump_of_node_.push_back(-1);
}

void Trajectory::record_jump(Eigen::VectorXd right) {
  require(!times_.empty(), "jump recorded on an empty trajectory");
  const std::size_t node = times_.size() - 1;
  require(jump_of_node_[node] < 0, "node already carries a jump");
  Jump jump{node, times_[node], states_[node], right};
  states_[node] = std::move(right);
  jump_of_node_[node] = static_cast<std::ptrdiff_t>(jumps_.size());
  jumps_.push_back(std::move(jump));
}

const Eigen::VectorXd& Trajectory::left_state(std::size_t i) const {
  const auto j = jump_of_node_.at(i);
  return j < 0 ? states_[i] : jumps_[static_cast<std::size_t>(j)].left;
}

std::ptrdiff_t Trajectory::node_index(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t - time_tolerance(t));
  if (it != times_.end() && std::abs(*it - t) <= time_tolerance(t)) return it - times_.begin();
  return -1;
}

Eigen::VectorXd Trajectory::value(double t, Side side) const {
  if (!(t >= start_time() - time_tolerance(t)))
    fail(ErrorKind::invalid_argument, "history query before coverage start at t=" + format_double(t));
  if (times_.empty() || t < -time_tolerance(t)) return history_(std::max(t, -delay_));
  if (t > end_time() + time_tolerance(t))
    fail(ErrorKind::invalid_argument, "history query beyond trajectory end at t=" + format_double(t));

  if (const auto node = node_index(t); node >= 0) {
    const auto i = static_cast<std::size_t>(node);
    return side == Side::left ? left_state(i) : states_[i];
  }
  const auto upper = std::upper_bound(times_.begin(), times_.end(), t);
  const auto hi = static_cast<std::size_t>(upper - times_.begin());
  const std::size_t lo = hi - 1;
  const double theta = (t - times_[lo]) / (times_[hi] - times_[lo]);
  return (1.0 - theta) * states_[lo] + theta * left_state(hi);
}

void Trajectory::write_csv(std::ostream& out) const {
  std::vector<std::string> columns{"time", "jump_flag"};
  for (const auto& mode : basis_->modes())
    columns.push_back("c_" + std::to_string(mode.eigen_index) + "_" + std::to_string(mode.multiplicity_index));
  write_csv_schema(out, columns);

  auto row = [&out](double t, const char* flag, const Eigen::VectorXd& c) {
    out << format_double(t) << ',' << flag;
    for (Eigen::Index i = 0; i < c.size(); ++i) out << ',' << format_double(c[i]);
    out << '\n';
  };
  const auto history_nodes = static_cast<long>(std::llround(delay_ / history_step_));
  for (long i = 0; i < history_nodes; ++i) {
    const double s = -delay_ + static_cast<double>(i) * history_step_;
    if (s >= 0.0) break;
    row(s, "C", history_(s));
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (jump_of_node_[i] >= 0) {
      row(times_[i], "L", left_state(i));
      row(times_[i], "R", states_[i]);
    } else {
      row(times_[i], "C", states_[i]);
    }
  }
}

StateVector evaluate_history(const Trajectory& traj, double t, double s, Side side) {
  require(s <= 0.0 && s >= -traj.delay() - time_tolerance(s), "history offset must lie in [-r, 0]");
  return traj.state_at(t + s, side);
}

}  // namespace apxctl
