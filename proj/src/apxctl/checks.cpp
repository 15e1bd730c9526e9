#include "apxctl/checks.hpp"

#include "apxctl/error.hpp"
#include "apxctl/output.hpp"
#include "apxctl/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace apxctl {

bool CheckSuiteResult::all_passed() const { return failures() == 0; }

std::size_t CheckSuiteResult::failures() const {
  return static_cast<std::size_t>(std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.passed; }));
}

double l2_pairing_with_adjoint(const ControlContext& ctx, const ControlSignal& u, const StateVector& z) {
  const Eigen::ArrayXd lambda = ctx.basis->eigenvalues().array();
  const Eigen::MatrixXd& B = ctx.control.matrix();
  const double tau = ctx.window.horizon;
  double total = 0.0;
  for (std::size_t n = 0; n + 1 < u.size(); ++n) {
    const double a = u.times[n], b = u.times[n + 1];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t q = 0; q < GaussLegendre5::nodes.size(); ++q) {
      const double s = mid + half * GaussLegendre5::nodes[q];
      const double theta = (s - a) / (b - a);
      const Eigen::VectorXd us = (1.0 - theta) * u.values[n] + theta * u.values[n + 1];
      const Eigen::VectorXd adj = B.transpose() * ((-lambda * (tau - s)).exp() * z.coeffs().array()).matrix();
      total += half * GaussLegendre5::weights[q] * us.dot(adj);
    }
  }
  return total;
}

std::size_t identity_panels(const SpectralBasis& basis, const TimeWindow& window, double tolerance) {
  const double lambda_max = basis.eigenvalues().maxCoeff();
  const double h = std::sqrt(6.0 * tolerance) / lambda_max;
  return static_cast<std::size_t>(std::max(64.0, std::ceil(window.length / h)));
}

namespace {

class Collector {
 public:
  explicit Collector(CheckSuiteResult& out) : out_(out) {}
  void suite(std::string name) { suite_ = std::move(name); }

  /// Passes when value <= tolerance.
  void at_most(const std::string& name, double value, double tolerance, std::string detail = {}) {
    out_.results.push_back({suite_, name, std::isfinite(value) && value <= tolerance, value, tolerance, std::move(detail)});
  }
  void holds(const std::string& name, bool ok, std::string detail = {}) {
    out_.results.push_back({suite_, name, ok, ok ? 0.0 : 1.0, 0.0, std::move(detail)});
  }

 private:
  CheckSuiteResult& out_;
  std::string suite_;
};

void semigroup_suite(Collector& c, const BasisPtr& basis, Rng& rng) {
  c.suite("semigroup");
  const auto m = static_cast<Eigen::Index>(basis->size());
  const std::vector<double> times{0.0, 1e-3, 0.01, 0.1, 0.37, 1.0};
  double law = 0.0, adjoint = 0.0, commute = 0.0;
  bool monotone = true, beta0 = true;
  std::vector<StateVector> samples;
  for (int trial = 0; trial < 8; ++trial) {
    const StateVector x(basis, rng.vector(m));
    const StateVector y(basis, rng.vector(m));
    samples.push_back(x);
    const double scale = x.norm() * y.norm();
    for (double t : times) {
      for (double s : times) {
        const auto lhs = semigroup_apply(t + s, x).coeffs();
        const auto rhs = semigroup_apply(t, semigroup_apply(s, x)).coeffs();
        law = std::max(law, (lhs - rhs).norm() / x.norm());
      }
      adjoint = std::max(adjoint, std::abs(inner_product(semigroup_apply(t, x), y) -
                                           inner_product(x, semigroup_apply(t, y))) / scale);
      for (double beta : {0.25, 0.5, 1.0}) {
        const auto a = fractional_power_apply(beta, semigroup_apply(t, x)).coeffs();
        const auto b = semigroup_apply(t, fractional_power_apply(beta, x)).coeffs();
        commute = std::max(commute, (a - b).norm() / std::max(1.0, b.norm()));
      }
    }
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
      if (semigroup_apply(times[i + 1], x).norm() > semigroup_apply(times[i], x).norm()) monotone = false;
    if (beta_norm(0.0, x) != x.coeffs().norm()) beta0 = false;
  }
  c.at_most("semigroup_law", law, 1e-12);
  c.at_most("self_adjoint", adjoint, 1e-12);
  c.at_most("fractional_commutation", commute, 1e-12);
  c.holds("monotone_decay", monotone);
  c.holds("beta0_is_euclidean", beta0);

  std::vector<double> decay_times;
  std::vector<StateVector> decay_states;
  for (const auto& x : samples)
    for (double t : times) {
      decay_times.push_back(t);
      decay_states.push_back(x);
    }
  const DecayReport decay = decay_bound_check(*basis, decay_times, decay_states);
  c.holds("decay_bound", decay.holds, "max ratio " + format_double(decay.max_ratio));
}

void growth_suite(Collector& c, const ProblemSpec& spec, const Trajectory& run, Rng& rng) {
  c.suite("growth");
  std::vector<GrowthSample> samples;
  const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.control.control_dim()));
  for (std::size_t i = 0; i < run.size(); i += std::max<std::size_t>(1, run.size() / 64))
    samples.push_back({run.times()[i], run.value(run.times()[i] - spec.delay), u0});
  const auto m = static_cast<Eigen::Index>(spec.basis->size());
  for (double scale : {1e-3, 0.1, 1.0, 3.0, 10.0})
    for (int trial = 0; trial < 4; ++trial) samples.push_back({0.0, scale * rng.vector(m), u0});
  const GrowthReport report = growth_bound_check(spec.nonlinearity, spec.growth, samples);
  c.holds("growth_bound_" + spec.nonlinearity.tag(), report.holds,
          "min slack " + format_double(report.min_slack) + ", " + std::to_string(report.violations.size()) +
              " violations");
}

void integrator_suite(Collector& c, const ProblemSpec& spec, const SteeringConfig& steering, const Trajectory& run) {
  c.suite("integrator");
  double jump_defect = 0.0;
  for (const auto& jump : run.jumps()) {
    const auto it = std::find_if(spec.impulses.begin(), spec.impulses.end(),
                                 [&](const ImpulseMap& k) { return std::abs(k.time() - jump.time) <= time_tolerance(jump.time); });
    if (it == spec.impulses.end()) {
      jump_defect = INFINITY;
      continue;
    }
    const Eigen::VectorXd expected = jump.left + (*it)(jump.left, steering.base_control(jump.time));
    jump_defect = std::max(jump_defect, (jump.right - expected).lpNorm<Eigen::Infinity>());
  }
  c.at_most("jump_consistency", jump_defect, 0.0, std::to_string(run.jumps().size()) + " jumps");
  c.holds("impulse_count", run.jumps().size() == spec.impulses.size());

  const Trajectory again = integrate_mild(spec, steering.base_control, 0.0, spec.horizon, nullptr, steering.integrator);
  c.holds("determinism", again.times() == run.times() && again.states() == run.states());

  ProblemSpec linear = spec;
  linear.memory_gain = linear.nonlinear_gain = 0.0;
  linear.impulses.clear();
  const Trajectory free = integrate_mild(linear, zero_control(spec.control.control_dim()), 0.0, spec.horizon, nullptr,
                                         steering.integrator);
  const StateVector phi0(spec.basis, spec.history(0.0));
  double exactness = 0.0;
  for (std::size_t i = 0; i < free.size(); ++i)
    exactness = std::max(exactness, (free.states()[i] - semigroup_apply(free.times()[i], phi0).coeffs()).norm());
  c.at_most("linear_homogeneous_exactness", exactness / std::max(1.0, phi0.norm()), 1e-12);
}

void gramian_suite(Collector& c, const ProblemSpec& spec, const SteeringConfig& steering, Rng& rng) {
  c.suite("gramian");
  const SpectralBasis& basis = *spec.basis;
  const auto m = static_cast<Eigen::Index>(basis.size());
  const H1Report h1 = check_h1(basis, spec.control);
  const std::string rank = "rank " + std::to_string(h1.rank) + " of " + std::to_string(h1.modes);
  for (double delta : steering.deltas) {
    const std::string tag = "delta=" + format_double(delta);
    const TimeWindow window{spec.horizon, delta};
    const GramianMatrix q = assemble_gramian(basis, spec.control, window);
    const double trace = q.entries().trace();
    c.at_most("symmetry " + tag, q.symmetry_defect(), 1e-14 * std::max(1.0, q.entries().norm()));
    c.at_most("psd " + tag, -q.min_eigenvalue(), 1e-12 * std::max(trace, 1e-300) / static_cast<double>(m));
    c.holds("h1_iff_spd " + tag, h1.holds == q.is_positive_definite(),
            rank + ", min eig " + format_double(q.min_eigenvalue()) + ", threshold " + format_double(q.spd_threshold()));

    const GramianMatrix quad = assemble_gramian_quadrature(basis, spec.control, window, 2048);
    c.at_most("analytic_vs_quadrature " + tag, (quad.entries() - q.entries()).norm() / q.entries().norm(), 1e-10);

    const ControlContext ctx{spec.basis, spec.control, window};
    // adjoint pairing on a random piecewise-linear control
    const auto grid = uniform_window_grid(window, 512);
    ControlSignal u;
    u.times = grid;
    for (std::size_t i = 0; i < grid.size(); ++i)
      u.values.push_back(rng.vector(static_cast<Eigen::Index>(spec.control.control_dim())));
    const StateVector z(spec.basis, rng.vector(m));
    const double lhs = inner_product(control_map_apply(ctx, u), z);
    const double rhs = l2_pairing_with_adjoint(ctx, u, z);
    c.at_most("adjoint_pairing " + tag, std::abs(lhs - rhs) / (std::sqrt(u.inner_product(u)) * z.norm()), 1e-8);

    if (!q.is_positive_definite()) continue;
    const Eigen::VectorXd w = rng.vector(m);
    const auto fine = uniform_window_grid(window, identity_panels(basis, window, 1e-8));
    double identity = 0.0;
    for (double alpha : steering.alphas)
      identity = std::max(identity, steering_identity_check(alpha, ctx, q, w, fine).defect / w.norm());
    c.at_most("regularized_identity " + tag, identity, 1e-8);

    const VanishingReport vanishing = vanishing_regularization_check(q, w, steering.alphas);
    c.holds("vanishing_regularization " + tag, vanishing.ok(),
            "final " + format_double(vanishing.rows.back().norm) + " <= bound " + format_double(vanishing.final_bound));
  }
}

void steering_suite(Collector& c, const ProblemSpec& spec, const SteeringConfig& steering) {
  c.suite("steering");
  const double delta = steering.deltas.front();
  const TwoPhaseRunner runner(spec, steering, delta);
  double pullback = 0.0;
  bool triangle = true, monotone_gap = true;
  double previous_gap = INFINITY;
  const double tolerance_gap = 1e-9 * std::max(1.0, steering.target.norm());
  for (double alpha : steering.alphas) {
    const SteeringCell cell = runner.run(alpha);
    pullback = std::max(pullback, cell.pullback_residual);
    triangle = triangle && error_decomposition(cell).triangle_holds;
    if (cell.gap_lin > previous_gap + tolerance_gap) monotone_gap = false;
    previous_gap = cell.gap_lin;
  }
  const std::string tag = " delta=" + format_double(delta);
  c.at_most("pullback" + tag, pullback, 1e-12);
  c.holds("triangle" + tag, triangle);
  c.holds("monotone_linear_gap" + tag, monotone_gap);
}

}  // namespace

CheckSuiteResult run_check_suite(const ExperimentConfig& cfg) {
  const BasisPtr basis = make_basis(cfg);
  const ProblemSpec spec = make_problem(cfg, basis);
  const SteeringConfig steering = make_steering(cfg, spec);
  Rng rng(0x5eed1234abcdULL);

  CheckSuiteResult out;
  Collector c(out);
  semigroup_suite(c, basis, rng);
  const Trajectory run = integrate_mild(spec, steering.base_control, 0.0, spec.horizon, nullptr, steering.integrator);
  growth_suite(c, spec, run, rng);
  integrator_suite(c, spec, steering, run);
  gramian_suite(c, spec, steering, rng);
  if (check_h1(*basis, spec.control).holds) steering_suite(c, spec, steering);
  return out;
}

}  // namespace apxctl
