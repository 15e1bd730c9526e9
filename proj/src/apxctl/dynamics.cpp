#include "apxctl/dynamics.hpp"

#include "apxctl/error.hpp"
#include "apxctl/output.hpp"
#include "apxctl/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace apxctl {

std::vector<std::string> ProblemSpec::violations() const {
  std::vector<std::string> out;
  if (!basis) {
    out.emplace_back("problem has no spectral basis");
    return out;
  }
  const auto m = basis->size();
  if (!(delay > 0.0) || !std::isfinite(delay)) out.emplace_back("delay r must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) out.emplace_back("horizon tau must be positive");
  if (!std::isfinite(memory_gain) || !std::isfinite(nonlinear_gain))
    out.emplace_back("gains a and b must be finite");
  for (std::size_t k = 0; k < impulses.size(); ++k) {
    const double t = impulses[k].time();
    if (!(t > 0.0 && t < horizon))
      out.push_back("impulse " + std::to_string(k + 1) + " at t=" + format_double(t) +
                    " must lie in (0, tau)");
    if (k > 0 && !(t > impulses[k - 1].time()))
      out.push_back("impulse times must be strictly increasing (t_" + std::to_string(k + 1) +
                    " <= t_" + std::to_string(k) + ")");
    if (impulses[k].kind() == ImpulseMap::Kind::fixed &&
        static_cast<std::size_t>(impulses[k].jump().size()) > m)
      out.push_back("impulse " + std::to_string(k + 1) + " jump vector longer than the basis");
  }
  if (control.state_dim() != m) out.emplace_back("control operator does not map into the basis");
  if (static_cast<std::size_t>(history.profile().size()) != m)
    out.emplace_back("initial history profile length does not match the basis");
  if (!growth.valid()) out.emplace_back("growth bound needs e > 0, exponent >= 1, eta >= 0");
  return out;
}

void ProblemSpec::validate() const {
  const auto list = violations();
  if (list.empty()) return;
  std::string message = "invalid problem:";
  for (const auto& v : list) message += "\n  - " + v;
  fail(ErrorKind::validation, message);
}

double ProblemSpec::last_impulse_time() const { return impulses.empty() ? 0.0 : impulses.back().time(); }

bool ProblemSpec::is_linear() const {
  return (memory_gain == 0.0 || memory.is_zero()) && (nonlinear_gain == 0.0 || nonlinearity.is_zero()) &&
         impulses.empty();
}

ControlFn zero_control(std::size_t control_dim) {
  const auto n = static_cast<Eigen::Index>(control_dim);
  return [n](double) { return Eigen::VectorXd::Zero(n); };
}

ControlFn constant_control(Eigen::VectorXd value) {
  return [value = std::move(value)](double) { return value; };
}

double step_size(const ProblemSpec& spec, const IntegratorOptions& options) {
  require(options.steps_per_delay >= 1, "steps per delay must be a positive integer");
  return spec.delay / options.steps_per_delay;
}

std::vector<double> problem_breakpoints(const ProblemSpec& spec, double t0, double t1) {
  std::vector<double> points;
  auto add_translates = [&](double origin) {
    for (int n = 0;; ++n) {
      const double t = origin + n * spec.delay;
      if (t >= t1) break;
      if (t > t0) points.push_back(t);
    }
  };
  add_translates(0.0);
  for (const auto& impulse : spec.impulses) add_translates(impulse.time());
  std::sort(points.begin(), points.end());
  return points;
}

std::vector<double> integration_grid(const ProblemSpec& spec, const IntegratorOptions& options,
                                     double t0, double t1) {
  require(t1 > t0, "integration window must have positive length");
  const double h = step_size(spec, options);
  std::vector<double> cuts = problem_breakpoints(spec, t0, t1);
  for (double t : options.extra_breakpoints)
    if (t > t0 && t < t1) cuts.push_back(t);
  cuts.push_back(t0);
  cuts.push_back(t1);
  std::sort(cuts.begin(), cuts.end());

  const double merge = 1e-9 * h;
  std::vector<double> anchors;
  for (double t : cuts) {
    if (anchors.empty() || t - anchors.back() > merge) {
      anchors.push_back(t);
    } else if (t == t1) {
      anchors.back() = t1;
    }
  }
  if (anchors.front() != t0) anchors.front() = t0;

  std::vector<double> grid{anchors.front()};
  for (std::size_t s = 0; s + 1 < anchors.size(); ++s) {
    const double a = anchors[s];
    const double b = anchors[s + 1];
    const auto panels = std::max<long>(1, static_cast<long>(std::ceil((b - a) / h - 1e-9)));
    const double width = (b - a) / static_cast<double>(panels);
    for (long i = 1; i < panels; ++i) grid.push_back(a + static_cast<double>(i) * width);
    grid.push_back(b);
  }
  return grid;
}

namespace {

struct ForcingTerms {
  Eigen::VectorXd total;
  double nonlinear_norm = 0.0;
  double memory_norm = 0.0;
};

}  // namespace

Trajectory integrate_mild(const ProblemSpec& spec, const ControlFn& control, double t0, double t1,
                          const Trajectory* incoming, const IntegratorOptions& options) {
  spec.validate();
  const double h = step_size(spec, options);
  require(h <= spec.delay, "step must not exceed the delay");

  Trajectory traj = incoming ? *incoming : Trajectory(spec.basis, spec.delay, spec.history, h);
  if (incoming) {
    require(incoming->basis()->same_as(*spec.basis), "incoming trajectory uses a different basis");
    require(std::abs(incoming->end_time() - t0) <= time_tolerance(t0),
            "incoming trajectory must end at the window start");
  } else {
    require(t0 == 0.0, "a fresh integration starts at t = 0");
    traj.append(0.0, spec.history(0.0));
  }
  const auto grid = integration_grid(spec, options, t0, t1);

  const Eigen::ArrayXd lambda = spec.basis->eigenvalues().array();
  const bool with_memory = spec.memory_gain != 0.0 && !spec.memory.is_zero();
  const bool with_nonlinear = spec.nonlinear_gain != 0.0 && !spec.nonlinearity.is_zero();

  Eigen::VectorXd state = traj.states().back();
  Eigen::VectorXd memory = traj.memory_accumulator();

  auto forcing = [&](double t, const Eigen::VectorXd& u, const Eigen::VectorXd& delayed,
                     const Eigen::VectorXd& mem) {
    ForcingTerms f;
    f.total = spec.control.apply(u);
    if (with_memory) {
      f.total += spec.memory_gain * mem;
      f.memory_norm = std::abs(spec.memory_gain) * mem.norm();
    }
    if (with_nonlinear) {
      const Eigen::VectorXd nl = spec.nonlinear_gain * spec.nonlinearity(t, delayed, u);
      f.nonlinear_norm = nl.norm();
      f.total += nl;
    }
    return f;
  };

  std::size_t next_impulse = 0;
  while (next_impulse < spec.impulses.size() &&
         spec.impulses[next_impulse].time() <= t0 + time_tolerance(t0))
    ++next_impulse;

  PanelWeights weights(lambda);

  for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
    const double ta = grid[n];
    const double tb = grid[n + 1];
    const double dt = tb - ta;
    const PanelWeights::Set& w = weights(dt);

    const Eigen::VectorXd ua = control(ta);
    const Eigen::VectorXd ub = control(tb);
    const Eigen::VectorXd delayed_a = traj.value(ta - spec.delay, Side::right);
    const Eigen::VectorXd delayed_b = traj.value(tb - spec.delay, Side::left);

    Eigen::VectorXd memory_b = memory;
    if (with_memory) {
      const double k = std::exp(-spec.memory.rate() * dt);
      memory_b = k * memory + 0.5 * dt * (k * spec.memory.integrand_state(delayed_a) +
                                          spec.memory.integrand_state(delayed_b));
    }
    const ForcingTerms fa = forcing(ta, ua, delayed_a, memory);
    const ForcingTerms fb = forcing(tb, ub, delayed_b, memory_b);

    state = (w.decay * state.array() + w.left * fa.total.array() + w.right * fb.total.array()).matrix();
    if (!state.allFinite())
      fail(ErrorKind::numerical, "non-finite state at t=" + format_double(tb));
    memory = std::move(memory_b);
    traj.append(tb, state, {fb.nonlinear_norm, fb.memory_norm});

    if (next_impulse < spec.impulses.size() &&
        std::abs(spec.impulses[next_impulse].time() - tb) <= time_tolerance(tb)) {
      const Eigen::VectorXd right = state + spec.impulses[next_impulse](state, ub);
      if (!right.allFinite())
        fail(ErrorKind::numerical, "non-finite state after impulse at t=" + format_double(tb));
      traj.record_jump(right);
      state = right;
      ++next_impulse;
    } else if (next_impulse < spec.impulses.size() && spec.impulses[next_impulse].time() < tb) {
      fail(ErrorKind::internal, "impulse time fell between grid nodes");
    }
  }
  traj.set_memory_accumulator(std::move(memory));
  return traj;
}

Eigen::VectorXd memory_integral(double t, const Trajectory& traj, const ProblemSpec& spec) {
  const auto m = static_cast<Eigen::Index>(spec.basis->size());
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(m);
  if (spec.memory.is_zero() || t <= 0.0) return sum;
  require(t <= traj.end_time() + time_tolerance(t), "memory integral needs coverage up to t");

  auto integrand = [&](double s, Side side) {
    return spec.memory(t, s, traj.value(s - spec.delay, side));
  };
  const auto& times = traj.times();
  double previous = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double s = std::min(times[i], t);
    if (s - previous > 0.0) sum += 0.5 * (s - previous) * (integrand(previous, Side::right) + integrand(s, Side::left));
    previous = s;
    if (times[i] >= t - time_tolerance(t)) break;
  }
  return sum;
}

}  // namespace apxctl
