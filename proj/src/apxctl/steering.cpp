#include "apxctl/steering.hpp"

#include "apxctl/error.hpp"
#include "apxctl/output.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace apxctl {

void validate_delta(const ProblemSpec& spec, double delta, bool enforce_delay_window) {
  if (!(delta > 0.0))
    fail(ErrorKind::validation, "delta=" + format_double(delta) + " must be positive");
  if (!(delta < spec.horizon - spec.last_impulse_time()))
    fail(ErrorKind::validation, "delta=" + format_double(delta) + " violates delta < tau - t_p");
  if (enforce_delay_window && !(delta < spec.delay))
    fail(ErrorKind::validation, "delta=" + format_double(delta) + " violates delta < r");
}

std::vector<std::string> SteeringConfig::violations(const ProblemSpec& spec) const {
  std::vector<std::string> out;
  if (deltas.empty()) out.emplace_back("delta ladder must not be empty");
  if (alphas.empty()) out.emplace_back("alpha ladder must not be empty");
  for (double d : deltas) {
    try {
      validate_delta(spec, d, enforce_delay_window);
    } catch (const Error& e) {
      out.emplace_back(e.what());
    }
  }
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0 && alphas[i] <= 1.0))
      out.push_back("alpha=" + format_double(alphas[i]) + " must lie in (0, 1]");
    if (i > 0 && !(alphas[i] < alphas[i - 1])) out.emplace_back("alpha ladder must be strictly decreasing");
  }
  if (!(epsilon >= 0.0)) out.emplace_back("epsilon must be nonnegative");
  if (!base_control) out.emplace_back("base control is not set");
  if (!target.basis() || !target.basis()->same_as(*spec.basis))
    out.emplace_back("target does not conform to the problem basis");
  return out;
}

void SteeringConfig::validate(const ProblemSpec& spec) const {
  const auto list = violations(spec);
  if (list.empty()) return;
  std::string message = "invalid steering configuration:";
  for (const auto& v : list) message += "\n  - " + v;
  fail(ErrorKind::validation, message);
}

TwoPhaseRunner::TwoPhaseRunner(const ProblemSpec& spec, const SteeringConfig& cfg, double delta)
    : spec_(&spec),
      cfg_(&cfg),
      delta_(delta),
      phase1_([&] {
        spec.validate();
        validate_delta(spec, delta, cfg.enforce_delay_window);
        require(cfg.base_control != nullptr, "base control is not set");
        return integrate_mild(spec, cfg.base_control, 0.0, spec.horizon - delta, nullptr, cfg.integrator);
      }()),
      base_(integrate_mild(spec, cfg.base_control, spec.horizon - delta, spec.horizon, &phase1_, cfg.integrator)),
      window_grid_(integration_grid(spec, cfg.integrator, spec.horizon - delta, spec.horizon)),
      context_{spec.basis, spec.control, TimeWindow{spec.horizon, delta}},
      gramian_(assemble_gramian(*spec.basis, spec.control, context_.window)) {}

SteeringCell TwoPhaseRunner::run(double alpha) const {
  const ProblemSpec& spec = *spec_;
  const SteeringConfig& cfg = *cfg_;
  SteeringCell cell;
  cell.delta = delta_;
  cell.alpha = alpha;

  const StateVector y0 = phase1_.final_state();
  const RegularizedControl control =
      synthesize_control(alpha, context_, gramian_, y0, cfg.target, window_grid_);
  Trajectory steered =
      integrate_mild(spec, control.signal.as_function(), spec.horizon - delta_, spec.horizon, &phase1_, cfg.integrator);

  const Eigen::VectorXd& z1 = cfg.target.coeffs();
  cell.final_state = steered.states().back();
  cell.comparison_state = linear_comparison(context_, y0, control.signal).coeffs();
  cell.final_error = (cell.final_state - z1).norm();
  cell.gap_nl = (cell.final_state - cell.comparison_state).norm();
  cell.gap_lin = (cell.comparison_state - z1).norm();
  cell.predicted_gap_lin = (alpha * control.multiplier).norm();
  cell.pullback_residual = pullback_check(base_, steered, delta_, spec.delay);
  cell.final_error_beta_half = beta_norm(0.5, StateVector(spec.basis, cell.final_state - z1));

  double sup = 0.0;
  const double start = spec.horizon - delta_;
  for (std::size_t i = 0; i < steered.size(); ++i) {
    if (steered.times()[i] < start - time_tolerance(start)) continue;
    const auto& d = steered.diagnostics()[i];
    sup = std::max(sup, d.nonlinear + d.memory);
  }
  cell.window_bound = delta_ * sup;
  cell.accepted = cell.final_error < cfg.epsilon;
  if (cfg.keep_trajectories) cell.steered = std::move(steered);
  return cell;
}

SteeringCell run_two_phase(const ProblemSpec& spec, const SteeringConfig& cfg, double delta, double alpha) {
  return TwoPhaseRunner(spec, cfg, delta).run(alpha);
}

StateVector linear_comparison(const ControlContext& ctx, const StateVector& y0, const ControlSignal& control) {
  const StateVector free = semigroup_apply(ctx.window.length, y0);
  const StateVector forced = control_map_apply(ctx, control);
  return StateVector(ctx.basis, free.coeffs() + forced.coeffs());
}

double pullback_check(const Trajectory& base, const Trajectory& steered, double delta, double delay) {
  const double tau = steered.end_time();
  const double start = tau - delta;
  double residual = 0.0;
  for (double s : steered.times()) {
    if (s < start - time_tolerance(start)) continue;
    for (Side side : {Side::left, Side::right})
      residual = std::max(residual, (steered.value(s - delay, side) - base.value(s - delay, side)).norm());
  }
  return residual;
}

ErrorSplit error_decomposition(const SteeringCell& cell) {
  ErrorSplit split;
  split.gap_nl = cell.gap_nl;
  split.gap_lin = cell.gap_lin;
  split.total = cell.final_error;
  split.triangle_holds = split.total <= split.gap_nl + split.gap_lin + 1e-12;
  return split;
}

std::size_t SweepResult::accepted_count() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const auto& c) { return c.accepted; }));
}

SweepResult sweep(const ProblemSpec& spec, const SteeringConfig& cfg, unsigned jobs) {
  if (cfg.deltas.empty() || cfg.alphas.empty()) fail(ErrorKind::validation, "sweep ladders must not be empty");
  cfg.validate(spec);
  jobs = std::max(1u, jobs);

  std::vector<std::optional<TwoPhaseRunner>> runners(cfg.deltas.size());
  SweepResult result;
  result.deltas = cfg.deltas;
  result.alphas = cfg.alphas;
  result.epsilon = cfg.epsilon;
  result.cells.resize(cfg.deltas.size() * cfg.alphas.size());

  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run_pool = [&](std::size_t count, auto&& task) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    const unsigned extra = std::min<unsigned>(jobs, static_cast<unsigned>(count)) - 1;
    for (unsigned t = 0; t < extra; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  };

  run_pool(cfg.deltas.size(), [&](std::size_t d) { runners[d].emplace(spec, cfg, cfg.deltas[d]); });
  run_pool(result.cells.size(), [&](std::size_t i) {
    const std::size_t d = i / cfg.alphas.size();
    const std::size_t a = i % cfg.alphas.size();
    result.cells[i] = runners[d]->run(cfg.alphas[a]);
  });

  for (std::size_t i = 0; i < result.cells.size(); ++i)
    if (!result.best || result.cells[i].final_error < result.cells[*result.best].final_error) result.best = i;
  return result;
}

}  // namespace apxctl
