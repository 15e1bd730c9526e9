#include "apxctl/config.hpp"
#include "apxctl/error.hpp"
#include "apxctl/steering.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace apxctl;

namespace {

struct Setup {
  ExperimentConfig cfg;
  BasisPtr basis;
  ProblemSpec spec;
  SteeringConfig steering;
};

Setup load(const std::string& name) {
  Setup s;
  s.cfg = load_config(std::string(APXCTL_CONFIG_DIR) + "/" + name);
  s.basis = make_basis(s.cfg);
  s.spec = make_problem(s.cfg, s.basis);
  s.steering = make_steering(s.cfg, s.spec);
  return s;
}

}  // namespace

TEST_CASE("steering: linear final error equals the predicted regularization gap") {
  auto s = load("linear.json");
  const TwoPhaseRunner runner(s.spec, s.steering, s.steering.deltas.front());
  for (double alpha : s.steering.alphas) {
    const auto cell = runner.run(alpha);
    CAPTURE(alpha);
    CHECK(std::abs(cell.final_error - cell.predicted_gap_lin) <= 1e-6);
    CHECK(cell.gap_nl <= 1e-10);
    CHECK(cell.pullback_residual == 0.0);
  }
}

TEST_CASE("steering: the free evolution as target needs no control") {
  auto s = load("linear.json");
  s.steering.target = semigroup_apply(s.spec.horizon, StateVector(s.basis, s.spec.history(0.0)));
  const auto cell = run_two_phase(s.spec, s.steering, s.steering.deltas.front(), 0.5);
  CHECK(cell.final_error <= 1e-4);
}

TEST_CASE("steering: semilinear window of half the delay reaches the tolerance") {
  auto s = load("semilinear.json");
  const double r = s.spec.delay;
  const auto cell = run_two_phase(s.spec, s.steering, r / 2, std::ldexp(1.0, -12));
  CHECK(cell.final_error < 1e-2);
  const auto split = error_decomposition(cell);
  CHECK(split.triangle_holds);
}

TEST_CASE("steering: linear comparison examples") {
  const auto basis = SpectralBasis::from_spectrum({1.0}, {1});
  const ControlContext ctx{basis, ControlOperator::identity(*basis), TimeWindow{1.0, std::log(2.0)}};
  const auto q = assemble_gramian(*basis, ctx.control, ctx.window);
  const auto grid = uniform_window_grid(ctx.window, 4096);
  const auto u = synthesize_control(0.125, ctx, q, StateVector::zeros(basis),
                                    StateVector(basis, Eigen::VectorXd::Constant(1, 1.0)), grid);
  CHECK(std::abs(linear_comparison(ctx, StateVector::zeros(basis), u.signal).coeffs()[0] - 0.75) <= 1e-8);

  // against the integrator on a linear 8-mode problem
  const auto heat = SpectralBasis::heat_1d(8);
  ProblemSpec spec;
  spec.basis = heat;
  spec.delay = 0.5;
  spec.horizon = 1.0;
  spec.control = ControlOperator::identity(*heat);
  oracle::Random rng(51);
  spec.history = InitialHistory(rng.vector(8), InitialHistory::Shape::constant, 0.5);
  IntegratorOptions options;
  options.steps_per_delay = 100;
  const double delta = 0.3;
  const auto phase1 = integrate_mild(spec, zero_control(8), 0.0, 0.7, nullptr, options);
  const ControlContext ctx8{heat, spec.control, TimeWindow{1.0, delta}};
  const auto q8 = assemble_gramian(*heat, spec.control, ctx8.window);
  const auto grid8 = integration_grid(spec, options, 0.7, 1.0);
  const auto control = synthesize_control(0.01, ctx8, q8, phase1.final_state(), StateVector(heat, rng.vector(8)), grid8);
  const auto steered = integrate_mild(spec, control.signal.as_function(), 0.7, 1.0, &phase1, options);
  const auto y = linear_comparison(ctx8, phase1.final_state(), control.signal);
  CHECK((steered.states().back() - y.coeffs()).norm() <= 1e-10);
}

TEST_CASE("steering: window controls do not reach back through the delay") {
  auto s = load("semilinear.json");
  s.steering.keep_trajectories = true;
  const TwoPhaseRunner runner(s.spec, s.steering, 0.1);
  const auto a = runner.run(0.0625);
  const auto b = runner.run(std::ldexp(1.0, -12));
  CHECK(a.pullback_residual <= 1e-12);
  CHECK(b.pullback_residual <= 1e-12);

  // phase 1 is shared bit for bit
  const double start = s.spec.horizon - 0.1;
  REQUIRE(a.steered);
  REQUIRE(b.steered);
  for (std::size_t i = 0; i < a.steered->size() && a.steered->times()[i] <= start; ++i) {
    CHECK(a.steered->states()[i] == b.steered->states()[i]);
    CHECK(a.steered->states()[i] == runner.base().states()[i]);
  }
  // the regularized controls differ, so the window does too
  CHECK(a.final_state != b.final_state);

  // a window longer than the delay feeds the control back into the delayed terms
  s.steering.enforce_delay_window = false;
  const auto wide = run_two_phase(s.spec, s.steering, 0.3, std::ldexp(1.0, -8));
  CHECK(wide.pullback_residual > 1e-6);
}

TEST_CASE("steering: nonlinear gap shrinks with the window") {
  auto s = load("semilinear.json");
  const double alpha = std::ldexp(1.0, -10);
  std::vector<double> gaps;
  for (double delta : {0.1, 0.05, 0.025}) {
    const auto cell = run_two_phase(s.spec, s.steering, delta, alpha);
    CHECK(cell.gap_nl <= 1.1 * cell.window_bound);
    gaps.push_back(cell.gap_nl);
  }
  for (std::size_t i = 1; i < gaps.size(); ++i) {
    CHECK(gaps[i] / gaps[i - 1] >= 0.375);
    CHECK(gaps[i] / gaps[i - 1] <= 0.625);
  }
}

TEST_CASE("steering: linear gap decreases along the alpha ladder and the triangle bound holds") {
  auto s = load("semilinear.json");
  const TwoPhaseRunner runner(s.spec, s.steering, 0.05);
  double previous = 1e300;
  for (double alpha : s.steering.alphas) {
    const auto cell = runner.run(alpha);
    CHECK(cell.gap_lin <= previous);
    CHECK(std::abs(cell.gap_lin - cell.predicted_gap_lin) <= 1e-6);
    CHECK(error_decomposition(cell).triangle_holds);
    CHECK(cell.final_error <= cell.gap_nl + cell.gap_lin + 1e-12);
    previous = cell.gap_lin;
  }
}

TEST_CASE("steering: sweep acceptance and parallel determinism") {
  auto s = load("semilinear.json");
  s.steering.deltas = {0.1, 0.05};
  s.steering.alphas = {0.0625, 0.00390625, 0.000244140625};
  const auto serial = sweep(s.spec, s.steering, 1);
  const auto parallel = sweep(s.spec, s.steering, 2);
  REQUIRE(serial.cells.size() == 6);
  REQUIRE(parallel.cells.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(serial.cells[i].final_state == parallel.cells[i].final_state);
    CHECK(serial.cells[i].final_error == parallel.cells[i].final_error);
  }
  REQUIRE(serial.best);
  CHECK(serial.best == parallel.best);
  for (const auto& cell : serial.cells) CHECK(serial.cells[*serial.best].final_error <= cell.final_error);
  CHECK(serial.accepted_count() >= 1);

  s.steering.epsilon = 0.0;
  CHECK(sweep(s.spec, s.steering, 1).accepted_count() == 0);
}

TEST_CASE("steering: window length validation") {
  auto s = load("semilinear.json");
  auto message = [&](double delta) {
    try {
      validate_delta(s.spec, delta);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::validation);
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(0.1).empty());
  CHECK(message(0.0).find("positive") != std::string::npos);
  CHECK(message(0.2).find("delta < r") != std::string::npos);
  CHECK(message(0.6).find("tau - t_p") != std::string::npos);
  CHECK_NOTHROW(validate_delta(s.spec, 0.3, false));
  s.steering.deltas = {0.1, 0.3};
  CHECK_FALSE(s.steering.violations(s.spec).empty());
  CHECK_THROWS_AS(sweep(s.spec, s.steering), Error);
}
