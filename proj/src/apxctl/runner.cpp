#include "apxctl/runner.hpp"

#include "apxctl/checks.hpp"
#include "apxctl/error.hpp"
#include "apxctl/output.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <sstream>

#ifndef APXCTL_VERSION_STRING
#define APXCTL_VERSION_STRING "0.0.0"
#endif

namespace apxctl {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Context {
  ExperimentConfig cfg;
  BasisPtr basis;
  ProblemSpec spec;
  SteeringConfig steering;
  unsigned jobs = 1;
  RunOutcome outcome;

  explicit Context(ExperimentConfig c, unsigned j)
      : cfg(std::move(c)), basis(make_basis(cfg)), spec(make_problem(cfg, basis)),
        steering(make_steering(cfg, spec)), jobs(j) {}

  void write(const std::string& name, const std::string& body) {
    write_text_file((fs::path(cfg.output_dir) / name).string(), body);
    outcome.files.push_back(name);
  }
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

// JSON has no inf/nan; those are written as strings.
json number(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

const std::vector<std::string> cell_columns{"delta",          "alpha",          "err_total",
                                            "gap_nl",         "gap_lin",        "predicted_gap_lin",
                                            "pullback_residual", "window_bound", "err_beta_half",
                                            "accepted"};

void write_cell_row(std::ostream& out, const SteeringCell& c) {
  out << format_double(c.delta) << ',' << format_double(c.alpha) << ',' << format_double(c.final_error) << ','
      << format_double(c.gap_nl) << ',' << format_double(c.gap_lin) << ',' << format_double(c.predicted_gap_lin)
      << ',' << format_double(c.pullback_residual) << ',' << format_double(c.window_bound) << ','
      << format_double(c.final_error_beta_half) << ',' << (c.accepted ? 1 : 0) << '\n';
}

json cell_json(const SteeringCell& c) {
  return json{{"delta", number(c.delta)},
              {"alpha", number(c.alpha)},
              {"err_total", number(c.final_error)},
              {"gap_nl", number(c.gap_nl)},
              {"gap_lin", number(c.gap_lin)},
              {"predicted_gap_lin", number(c.predicted_gap_lin)},
              {"pullback_residual", number(c.pullback_residual)},
              {"window_bound", number(c.window_bound)},
              {"err_beta_half", number(c.final_error_beta_half)},
              {"accepted", c.accepted},
              {"final_state", vector_json(c.final_state)}};
}

void run_simulate(Context& ctx) {
  const Trajectory traj =
      integrate_mild(ctx.spec, ctx.steering.base_control, 0.0, ctx.spec.horizon, nullptr, ctx.steering.integrator);
  std::ostringstream csv;
  traj.write_csv(csv);
  ctx.write("trajectory.csv", csv.str());
  const json summary{{"verb", "simulate"},
                     {"nodes", traj.size()},
                     {"jumps", traj.jumps().size()},
                     {"step", number(step_size(ctx.spec, ctx.steering.integrator))},
                     {"final_norm", number(traj.states().back().norm())},
                     {"final_state", vector_json(traj.states().back())}};
  ctx.write("simulate.json", summary.dump(2) + "\n");
  ctx.outcome.report = "simulate: " + std::to_string(traj.size()) + " nodes, " + std::to_string(traj.jumps().size()) +
                       " jumps, ||z(tau)|| = " + format_double(traj.states().back().norm()) + "\n";
}

void run_steer(Context& ctx) {
  SteeringConfig cfg = ctx.steering;
  cfg.keep_trajectories = true;
  const double delta = cfg.deltas.front(), alpha = cfg.alphas.front();
  SteeringCell cell = run_two_phase(ctx.spec, cfg, delta, alpha);

  std::ostringstream csv;
  write_csv_schema(csv, cell_columns);
  write_cell_row(csv, cell);
  ctx.write("steer.csv", csv.str());
  std::ostringstream traj;
  cell.steered->write_csv(traj);
  ctx.write("steer_trajectory.csv", traj.str());
  json summary = cell_json(cell);
  summary["verb"] = "steer";
  summary["epsilon"] = number(cfg.epsilon);
  ctx.write("steer.json", summary.dump(2) + "\n");
  ctx.outcome.report = "steer: delta=" + format_double(delta) + " alpha=" + format_double(alpha) +
                       " ||z(tau)-z1|| = " + format_double(cell.final_error) +
                       (cell.accepted ? " (accepted)\n" : " (not below epsilon)\n");
}

void run_sweep(Context& ctx) {
  const SweepResult result = sweep(ctx.spec, ctx.steering, ctx.jobs);
  std::ostringstream csv;
  write_csv_schema(csv, cell_columns);
  for (const auto& cell : result.cells) write_cell_row(csv, cell);
  ctx.write("sweep.csv", csv.str());

  json summary{{"verb", "sweep"},
               {"cells", result.cells.size()},
               {"accepted", result.accepted_count()},
               {"epsilon", number(result.epsilon)}};
  if (result.best) summary["best"] = cell_json(result.cells[*result.best]);
  ctx.write("sweep.json", summary.dump(2) + "\n");

  std::ostringstream report;
  report << "sweep: " << result.cells.size() << " cells, " << result.accepted_count() << " below epsilon "
         << format_double(result.epsilon) << '\n';
  if (result.best) {
    const auto& best = result.cells[*result.best];
    report << "best: delta=" << format_double(best.delta) << " alpha=" << format_double(best.alpha)
           << " ||z(tau)-z1|| = " << format_double(best.final_error) << '\n';
  }
  ctx.outcome.report = report.str();
}

void run_gramian(Context& ctx) {
  const H1Report h1 = check_h1(*ctx.basis, ctx.spec.control);
  json windows = json::array();
  std::ostringstream report;
  report << "gramian: rank condition " << (h1.holds ? "holds" : "FAILS") << ", rank " << h1.rank << " of " << h1.modes << '\n';
  for (std::size_t k = 0; k < ctx.steering.deltas.size(); ++k) {
    const double delta = ctx.steering.deltas[k];
    const GramianMatrix q = assemble_gramian(*ctx.basis, ctx.spec.control, TimeWindow{ctx.spec.horizon, delta});
    const auto m = q.size();

    std::vector<std::string> columns;
    for (std::size_t j = 0; j < m; ++j) columns.push_back("q_" + std::to_string(j + 1));
    std::ostringstream csv;
    write_csv_schema(csv, columns);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j)
        csv << (j ? "," : "") << format_double(q.entries()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      csv << '\n';
    }
    const std::string name = "gramian_" + std::to_string(k + 1) + ".csv";
    ctx.write(name, csv.str());

    json conditions = json::array();
    report << "  delta=" << format_double(delta) << ": min eig " << format_double(q.min_eigenvalue()) << ", max eig "
           << format_double(q.max_eigenvalue()) << (q.is_positive_definite() ? ", SPD" : ", not SPD") << '\n';
    for (double alpha : ctx.steering.alphas) {
      const double cond = q.regularized_condition(alpha);
      conditions.push_back({{"alpha", number(alpha)}, {"condition", number(cond)}});
      report << "    alpha=" << format_double(alpha) << " cond(alpha I + Q) = " << format_double(cond) << '\n';
    }
    windows.push_back({{"delta", number(delta)},
                       {"file", name},
                       {"min_eigenvalue", number(q.min_eigenvalue())},
                       {"max_eigenvalue", number(q.max_eigenvalue())},
                       {"spd_threshold", number(q.spd_threshold())},
                       {"positive_definite", q.is_positive_definite()},
                       {"conditions", conditions}});
  }
  ctx.outcome.warning = !h1.holds;
  const json summary{{"verb", "gramian"},
                     {"h1", h1.holds},
                     {"rank", h1.rank},
                     {"modes", h1.modes},
                     {"warning", h1.holds ? json(nullptr) : json("rank condition fails: B* annihilates an eigenspace direction")},
                     {"windows", windows}};
  ctx.write("gramian.json", summary.dump(2) + "\n");
  if (!h1.holds) report << "warning: rank condition fails, the Gramian is singular\n";
  ctx.outcome.report = report.str();
}

void run_check(Context& ctx) {
  const CheckSuiteResult result = run_check_suite(ctx.cfg);
  std::ostringstream csv, report;
  write_csv_schema(csv, {"suite", "name", "passed", "value", "tolerance"});
  for (const auto& r : result.results) {
    csv << r.suite << ',' << r.name << ',' << (r.passed ? 1 : 0) << ',' << format_double(r.value) << ','
        << format_double(r.tolerance) << '\n';
    report << (r.passed ? "PASS " : "FAIL ") << r.suite << '/' << r.name << "  value=" << format_double(r.value)
           << " tol=" << format_double(r.tolerance);
    if (!r.detail.empty()) report << "  (" << r.detail << ')';
    report << '\n';
  }
  report << result.results.size() - result.failures() << '/' << result.results.size() << " checks passed\n";
  ctx.write("check.csv", csv.str());
  ctx.outcome.report = report.str();
  if (!result.all_passed()) ctx.outcome.exit_code = static_cast<int>(ErrorKind::check_failed);
}

}  // namespace

const std::vector<std::string>& known_verbs() {
  static const std::vector<std::string> verbs{"simulate", "steer", "sweep", "gramian", "check"};
  return verbs;
}

ExperimentConfig apply_overrides(ExperimentConfig cfg, const RunOptions& options) {
  if (options.out_dir) cfg.output_dir = *options.out_dir;
  if (options.alpha) cfg.alphas = {*options.alpha};
  if (options.delta) cfg.deltas = {*options.delta};
  const auto errors = validate_config(cfg);
  if (!errors.empty()) {
    std::string message = "invalid configuration after overrides:";
    for (const auto& e : errors) message += "\n  - " + e;
    fail(ErrorKind::validation, message);
  }
  return cfg;
}

RunOutcome run_verb(const std::string& verb, const ExperimentConfig& config, const RunOptions& options) {
  const auto& verbs = known_verbs();
  if (std::find(verbs.begin(), verbs.end(), verb) == verbs.end())
    fail(ErrorKind::invalid_argument, "unknown verb '" + verb + "'");
  Context ctx(apply_overrides(config, options), options.jobs);

  if (verb == "simulate") run_simulate(ctx);
  else if (verb == "steer") run_steer(ctx);
  else if (verb == "sweep") run_sweep(ctx);
  else if (verb == "gramian") run_gramian(ctx);
  else run_check(ctx);

  const json manifest{{"config_hash", hex64(config_hash(ctx.cfg))},
                      {"version", APXCTL_VERSION_STRING},
                      {"timestamp", utc_timestamp()},
                      {"verb", verb},
                      {"exit_code", ctx.outcome.exit_code},
                      {"warning", ctx.outcome.warning},
                      {"files", ctx.outcome.files}};
  write_text_file((fs::path(ctx.cfg.output_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  ctx.outcome.files.push_back("manifest.json");
  return std::move(ctx.outcome);
}

}  // namespace apxctl
