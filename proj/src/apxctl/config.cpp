#include "apxctl/config.hpp"

#include "apxctl/error.hpp"
#include "apxctl/output.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace apxctl {

using nlohmann::json;

namespace {

class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  const json* section(const json& parent, const std::string& key, const std::string& path) {
    if (!parent.contains(key)) return nullptr;
    const json& value = parent.at(key);
    if (!value.is_object()) {
      error(path + key + ": expected an object");
      return nullptr;
    }
    return &value;
  }

  void allow(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& [key, _] : obj.items())
      if (!known.count(key)) error(path + key + ": unknown key");
  }

  void number(const json* obj, const char* key, const std::string& path, double& out) {
    if (!obj || !obj->contains(key)) return;
    const json& v = obj->at(key);
    if (!v.is_number()) return error(path + key + ": expected a number");
    out = v.get<double>();
  }

  template <typename Int>
  void integer(const json* obj, const char* key, const std::string& path, Int& out) {
    if (!obj || !obj->contains(key)) return;
    const json& v = obj->at(key);
    if (!v.is_number_integer()) return error(path + key + ": expected an integer");
    const auto value = v.get<long long>();
    if (value < 0 && std::is_unsigned_v<Int>) return error(path + key + ": must be nonnegative");
    out = static_cast<Int>(value);
  }

  void string(const json* obj, const char* key, const std::string& path, std::string& out) {
    if (!obj || !obj->contains(key)) return;
    const json& v = obj->at(key);
    if (!v.is_string()) return error(path + key + ": expected a string");
    out = v.get<std::string>();
  }

  template <typename T>
  void list(const json* obj, const char* key, const std::string& path, std::vector<T>& out) {
    if (!obj || !obj->contains(key)) return;
    const json& v = obj->at(key);
    if (!v.is_array()) return error(path + key + ": expected an array");
    std::vector<T> values;
    for (const auto& item : v) {
      if constexpr (std::is_integral_v<T>) {
        if (!item.is_number_integer()) return error(path + key + ": expected integers");
      } else {
        if (!item.is_number()) return error(path + key + ": expected numbers");
      }
      values.push_back(item.get<T>());
    }
    out = std::move(values);
  }

  void profile(const json* parent, const char* key, const std::string& path, ProfileConfig& out) {
    if (!parent) return;
    const json* obj = section(*parent, key, path);
    if (!obj) return;
    const std::string p = path + key + ".";
    allow(*obj, p, {"tag", "amplitude", "coefficients"});
    string(obj, "tag", p, out.tag);
    number(obj, "amplitude", p, out.amplitude);
    list(obj, "coefficients", p, out.coefficients);
  }

  void error(std::string message) { errors_.push_back(std::move(message)); }

 private:
  std::vector<std::string>& errors_;
};

std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

ExperimentConfig read_document(const json& doc, std::vector<std::string>& errors) {
  ExperimentConfig cfg;
  Reader r(errors);
  if (!doc.is_object()) {
    r.error("config root must be an object");
    return cfg;
  }
  r.allow(doc, "", {"basis", "problem", "control", "steering", "integrator", "output"});

  if (const json* basis = r.section(doc, "basis", "")) {
    r.allow(*basis, "basis.", {"preset", "modes"});
    r.string(basis, "preset", "basis.", cfg.preset);
    r.integer(basis, "modes", "basis.", cfg.modes);
  }
  if (const json* problem = r.section(doc, "problem", "")) {
    const std::string p = "problem.";
    r.allow(*problem, p,
            {"a", "b", "delay", "horizon", "nonlinearity", "memory", "impulses", "initial_history", "growth_bound"});
    r.number(problem, "a", p, cfg.memory_gain);
    r.number(problem, "b", p, cfg.nonlinear_gain);
    r.number(problem, "delay", p, cfg.delay);
    r.number(problem, "horizon", p, cfg.horizon);
    if (const json* f = r.section(*problem, "nonlinearity", p)) {
      const std::string q = p + "nonlinearity.";
      r.allow(*f, q, {"tag", "scale", "exponent", "cap"});
      r.string(f, "tag", q, cfg.nonlinearity);
      r.number(f, "scale", q, cfg.sigmoid_scale);
      r.number(f, "exponent", q, cfg.power_exponent);
      r.number(f, "cap", q, cfg.power_cap);
    }
    if (const json* mem = r.section(*problem, "memory", p)) {
      const std::string q = p + "memory.";
      r.allow(*mem, q, {"tag", "rate"});
      r.string(mem, "tag", q, cfg.memory);
      r.number(mem, "rate", q, cfg.memory_rate);
    }
    if (problem->contains("impulses")) {
      const json& list = problem->at("impulses");
      if (!list.is_array()) {
        r.error(p + "impulses: expected an array");
      } else {
        for (std::size_t k = 0; k < list.size(); ++k) {
          const std::string q = p + "impulses[" + std::to_string(k) + "].";
          if (!list[k].is_object()) {
            r.error(q + " expected an object");
            continue;
          }
          ImpulseConfig impulse;
          r.allow(list[k], q, {"time", "tag", "jump", "gain"});
          if (!list[k].contains("time")) r.error(q + "time: required");
          r.number(&list[k], "time", q, impulse.time);
          r.string(&list[k], "tag", q, impulse.tag);
          r.list(&list[k], "jump", q, impulse.jump);
          r.number(&list[k], "gain", q, impulse.gain);
          cfg.impulses.push_back(std::move(impulse));
        }
      }
    }
    if (const json* history = r.section(*problem, "initial_history", p)) {
      const std::string q = p + "initial_history.";
      r.allow(*history, q, {"tag", "amplitude", "coefficients", "shape"});
      r.string(history, "tag", q, cfg.history.tag);
      r.number(history, "amplitude", q, cfg.history.amplitude);
      r.list(history, "coefficients", q, cfg.history.coefficients);
      r.string(history, "shape", q, cfg.history_shape);
    }
    if (const json* growth = r.section(*problem, "growth_bound", p)) {
      const std::string q = p + "growth_bound.";
      r.allow(*growth, q, {"e", "exponent", "eta"});
      r.number(growth, "e", q, cfg.growth_coefficient);
      r.number(growth, "exponent", q, cfg.growth_exponent);
      r.number(growth, "eta", q, cfg.growth_offset);
    }
  }
  if (const json* control = r.section(doc, "control", "")) {
    r.allow(*control, "control.", {"operator", "box", "zero_adjoint_modes"});
    r.string(control, "operator", "control.", cfg.control_operator);
    r.list(control, "box", "control.", cfg.box);
    r.list(control, "zero_adjoint_modes", "control.", cfg.zero_adjoint_modes);
  }
  if (const json* steering = r.section(doc, "steering", "")) {
    const std::string p = "steering.";
    r.allow(*steering, p, {"deltas", "alphas", "epsilon", "target", "base_control"});
    r.list(steering, "deltas", p, cfg.deltas);
    r.list(steering, "alphas", p, cfg.alphas);
    r.number(steering, "epsilon", p, cfg.epsilon);
    r.profile(steering, "target", p, cfg.target);
    if (const json* base = r.section(*steering, "base_control", p)) {
      r.allow(*base, p + "base_control.", {"tag", "value"});
      r.string(base, "tag", p + "base_control.", cfg.base_control);
      r.list(base, "value", p + "base_control.", cfg.base_control_value);
    }
  }
  if (const json* integrator = r.section(doc, "integrator", "")) {
    r.allow(*integrator, "integrator.", {"steps_per_delay"});
    r.integer(integrator, "steps_per_delay", "integrator.", cfg.steps_per_delay);
  }
  if (const json* output = r.section(doc, "output", "")) {
    r.allow(*output, "output.", {"dir"});
    r.string(output, "dir", "output.", cfg.output_dir);
  }
  return cfg;
}

void check_profile(const ProfileConfig& profile, const std::string& where, std::size_t modes,
                   std::vector<std::string>& out) {
  static const std::set<std::string> tags{"smooth", "low_mode", "high_mode", "coefficients"};
  if (!tags.count(profile.tag)) out.push_back(where + ": unknown profile tag '" + profile.tag + "'");
  if (!std::isfinite(profile.amplitude)) out.push_back(where + ": amplitude must be finite");
  if (profile.coefficients.size() > modes)
    out.push_back(where + ": more coefficients than basis modes");
  if (profile.tag == "coefficients" && profile.coefficients.empty())
    out.push_back(where + ": tag 'coefficients' needs a coefficient list");
}

json profile_json(const ProfileConfig& p) {
  return json{{"tag", p.tag}, {"amplitude", p.amplitude}, {"coefficients", p.coefficients}};
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte);
    fail(ErrorKind::validation, origin + ":" + std::to_string(line) + ":" + std::to_string(column) +
                                    ": parse error: " + e.what());
  }
  std::vector<std::string> errors;
  ExperimentConfig cfg = read_document(doc, errors);
  if (errors.empty()) errors = validate_config(cfg);
  if (!errors.empty()) {
    std::string message = origin + ": invalid configuration (" + std::to_string(errors.size()) + " violations):";
    for (const auto& e : errors) message += "\n  - " + e;
    fail(ErrorKind::validation, message);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::validation, "cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

int effective_steps_per_delay(const ExperimentConfig& cfg) {
  if (cfg.steps_per_delay > 0) return cfg.steps_per_delay;
  return std::max(1, static_cast<int>(std::ceil(cfg.delay / (1e-3 * cfg.horizon) - 1e-9)));
}

std::vector<double> effective_deltas(const ExperimentConfig& cfg) {
  if (!cfg.deltas.empty()) return cfg.deltas;
  const double last = cfg.impulses.empty() ? 0.0 : cfg.impulses.back().time;
  std::vector<double> out;
  for (double divisor : {2.0, 4.0, 8.0}) {
    const double d = cfg.delay / divisor;
    if (d > 0.0 && d < cfg.horizon - last) out.push_back(d);
  }
  return out;
}

std::vector<double> effective_alphas(const ExperimentConfig& cfg) {
  if (!cfg.alphas.empty()) return cfg.alphas;
  std::vector<double> out;
  for (int k = 1; k <= 14; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.preset != "heat-1d" && cfg.preset != "heat-2d")
    out.push_back("basis.preset: unknown preset '" + cfg.preset + "'");
  if (cfg.modes < 1) out.emplace_back("basis.modes: need at least one mode");
  if (!(cfg.delay > 0.0)) out.emplace_back("problem.delay: r must be positive");
  if (!(cfg.horizon > 0.0)) out.emplace_back("problem.horizon: tau must be positive");
  if (!std::isfinite(cfg.memory_gain) || !std::isfinite(cfg.nonlinear_gain))
    out.emplace_back("problem.a/b: gains must be finite");

  static const std::set<std::string> f_tags{"F_zero", "F_delayed_sigmoid", "F_delayed_power"};
  static const std::set<std::string> m_tags{"M_zero", "M_exp_kernel"};
  if (!f_tags.count(cfg.nonlinearity))
    out.push_back("problem.nonlinearity.tag: unknown tag '" + cfg.nonlinearity + "'");
  if (cfg.nonlinearity == "F_delayed_power" && (!(cfg.power_exponent >= 1.0) || !(cfg.power_cap > 0.0)))
    out.emplace_back("problem.nonlinearity: power needs exponent >= 1 and cap > 0");
  if (!m_tags.count(cfg.memory)) out.push_back("problem.memory.tag: unknown tag '" + cfg.memory + "'");
  if (!(cfg.memory_rate >= 0.0)) out.emplace_back("problem.memory.rate: must be nonnegative");

  for (std::size_t k = 0; k < cfg.impulses.size(); ++k) {
    const auto& impulse = cfg.impulses[k];
    const std::string where = "problem.impulses[" + std::to_string(k) + "]";
    if (!(impulse.time > 0.0 && impulse.time < cfg.horizon))
      out.push_back(where + ": t_" + std::to_string(k + 1) + "=" + format_double(impulse.time) +
                    " must lie in (0, tau)");
    if (k > 0 && !(impulse.time > cfg.impulses[k - 1].time))
      out.push_back(where + ": impulse times must be strictly increasing (t_" + std::to_string(k + 1) +
                    " <= t_" + std::to_string(k) + ")");
    if (impulse.tag != "fixed" && impulse.tag != "proportional")
      out.push_back(where + ": unknown impulse tag '" + impulse.tag + "'");
    if (impulse.tag == "fixed" && impulse.jump.size() > cfg.modes)
      out.push_back(where + ": jump vector longer than the basis");
  }

  check_profile(cfg.history, "problem.initial_history", cfg.modes, out);
  if (cfg.history_shape != "constant" && cfg.history_shape != "ramp")
    out.push_back("problem.initial_history.shape: unknown shape '" + cfg.history_shape + "'");
  if (!(cfg.growth_coefficient > 0.0) || !(cfg.growth_exponent >= 1.0) || !(cfg.growth_offset >= 0.0))
    out.emplace_back("problem.growth_bound: need e > 0, exponent >= 1, eta >= 0");

  if (cfg.control_operator != "identity" && cfg.control_operator != "restriction")
    out.push_back("control.operator: unknown operator '" + cfg.control_operator + "'");
  if (cfg.control_operator == "restriction") {
    if (cfg.box.size() != 4) {
      out.emplace_back("control.box: expected [x0, x1, y0, y1]");
    } else if (!(cfg.box[0] >= 0.0 && cfg.box[0] < cfg.box[1] && cfg.box[1] <= M_PI && cfg.box[2] >= 0.0 &&
                 cfg.box[2] < cfg.box[3] && cfg.box[3] <= M_PI)) {
      out.emplace_back("control.box: needs 0 <= x0 < x1 <= pi and 0 <= y0 < y1 <= pi");
    }
  }
  for (int mode : cfg.zero_adjoint_modes)
    if (mode < 1 || static_cast<std::size_t>(mode) > cfg.modes)
      out.push_back("control.zero_adjoint_modes: mode " + std::to_string(mode) + " out of range");

  const double last = cfg.impulses.empty() ? 0.0 : cfg.impulses.back().time;
  const auto deltas = effective_deltas(cfg);
  if (deltas.empty()) out.emplace_back("steering.deltas: no admissible delta in (0, min(r, tau - t_p))");
  for (double d : deltas) {
    if (!(d > 0.0)) out.push_back("steering.deltas: delta=" + format_double(d) + " must be positive");
    if (!(d < cfg.delay))
      out.push_back("steering.deltas: delta=" + format_double(d) + " violates delta < r (r=" +
                    format_double(cfg.delay) + ")");
    if (!(d < cfg.horizon - last))
      out.push_back("steering.deltas: delta=" + format_double(d) + " violates delta < tau - t_p");
  }
  const auto alphas = effective_alphas(cfg);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0 && alphas[i] <= 1.0))
      out.push_back("steering.alphas: alpha=" + format_double(alphas[i]) + " must lie in (0, 1]");
    if (i > 0 && !(alphas[i] < alphas[i - 1])) out.emplace_back("steering.alphas: ladder must be strictly decreasing");
  }
  if (!(cfg.epsilon >= 0.0)) out.emplace_back("steering.epsilon: must be nonnegative");
  check_profile(cfg.target, "steering.target", cfg.modes, out);
  if (cfg.base_control != "zero" && cfg.base_control != "constant")
    out.push_back("steering.base_control.tag: unknown tag '" + cfg.base_control + "'");
  if (cfg.base_control == "constant" && cfg.base_control_value.size() > cfg.modes)
    out.emplace_back("steering.base_control.value: longer than the control space");

  if (cfg.steps_per_delay < 0) out.emplace_back("integrator.steps_per_delay: must be positive");
  return out;
}

std::string emit_config(const ExperimentConfig& cfg) {
  json impulses = json::array();
  for (const auto& impulse : cfg.impulses)
    impulses.push_back({{"time", impulse.time}, {"tag", impulse.tag}, {"jump", impulse.jump}, {"gain", impulse.gain}});
  json history = profile_json(cfg.history);
  history["shape"] = cfg.history_shape;
  const json doc = {
      {"basis", {{"preset", cfg.preset}, {"modes", cfg.modes}}},
      {"problem",
       {{"a", cfg.memory_gain},
        {"b", cfg.nonlinear_gain},
        {"delay", cfg.delay},
        {"horizon", cfg.horizon},
        {"nonlinearity",
         {{"tag", cfg.nonlinearity}, {"scale", cfg.sigmoid_scale}, {"exponent", cfg.power_exponent}, {"cap", cfg.power_cap}}},
        {"memory", {{"tag", cfg.memory}, {"rate", cfg.memory_rate}}},
        {"impulses", impulses},
        {"initial_history", history},
        {"growth_bound", {{"e", cfg.growth_coefficient}, {"exponent", cfg.growth_exponent}, {"eta", cfg.growth_offset}}}}},
      {"control", {{"operator", cfg.control_operator}, {"box", cfg.box}, {"zero_adjoint_modes", cfg.zero_adjoint_modes}}},
      {"steering",
       {{"deltas", cfg.deltas},
        {"alphas", cfg.alphas},
        {"epsilon", cfg.epsilon},
        {"target", profile_json(cfg.target)},
        {"base_control", {{"tag", cfg.base_control}, {"value", cfg.base_control_value}}}}},
      {"integrator", {{"steps_per_delay", cfg.steps_per_delay}}},
      {"output", {{"dir", cfg.output_dir}}},
  };
  return doc.dump(2) + "\n";
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  // output.dir is excluded: it does not influence any numerical result
  ExperimentConfig canonical = cfg;
  canonical.output_dir.clear();
  return fnv1a64(emit_config(canonical));
}

BasisPtr make_basis(const ExperimentConfig& cfg) { return SpectralBasis::from_preset(cfg.preset, cfg.modes); }

Eigen::VectorXd make_profile(const ProfileConfig& profile, std::size_t modes) {
  const auto m = static_cast<Eigen::Index>(modes);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
  if (profile.tag == "smooth") {
    for (Eigen::Index i = 0; i < m; ++i) out[i] = profile.amplitude / static_cast<double>((i + 1) * (i + 1));
  } else if (profile.tag == "low_mode") {
    out[0] = profile.amplitude;
  } else if (profile.tag == "high_mode") {
    const Eigen::Index first = m / 2;
    const double value = profile.amplitude / std::sqrt(static_cast<double>(m - first));
    for (Eigen::Index i = first; i < m; ++i) out[i] = value;
  } else if (profile.tag == "coefficients") {
    require(profile.coefficients.size() <= modes, "profile has more coefficients than modes");
    for (std::size_t i = 0; i < profile.coefficients.size(); ++i)
      out[static_cast<Eigen::Index>(i)] = profile.coefficients[i];
  } else {
    fail(ErrorKind::validation, "unknown profile tag '" + profile.tag + "'");
  }
  return out;
}

ProblemSpec make_problem(const ExperimentConfig& cfg, const BasisPtr& basis) {
  ProblemSpec spec;
  spec.basis = basis;
  spec.memory_gain = cfg.memory_gain;
  spec.nonlinear_gain = cfg.nonlinear_gain;
  spec.delay = cfg.delay;
  spec.horizon = cfg.horizon;
  spec.nonlinearity = Nonlinearity::from_tag(cfg.nonlinearity, cfg.sigmoid_scale, cfg.power_exponent, cfg.power_cap);
  spec.memory = MemoryKernel::from_tag(cfg.memory, cfg.memory_rate);
  for (const auto& impulse : cfg.impulses) {
    if (impulse.tag == "fixed") {
      spec.impulses.push_back(ImpulseMap::fixed(
          impulse.time, Eigen::Map<const Eigen::VectorXd>(impulse.jump.data(), static_cast<Eigen::Index>(impulse.jump.size()))));
    } else {
      spec.impulses.push_back(ImpulseMap::proportional(impulse.time, impulse.gain));
    }
  }
  const auto m = basis->size();
  spec.history = InitialHistory(make_profile(cfg.history, m),
                                cfg.history_shape == "ramp" ? InitialHistory::Shape::ramp : InitialHistory::Shape::constant,
                                cfg.delay);
  spec.growth = GrowthBound{cfg.growth_coefficient, cfg.growth_exponent, cfg.growth_offset};

  ControlOperator control = ControlOperator::identity(*basis);
  if (cfg.control_operator == "restriction") {
    Box box;
    box.lo[0] = cfg.box[0];
    box.hi[0] = cfg.box[1];
    box.lo[1] = cfg.box[2];
    box.hi[1] = cfg.box[3];
    control = ControlOperator::restriction(*basis, box);
  }
  for (int mode : cfg.zero_adjoint_modes) {
    require(static_cast<std::size_t>(mode) <= m, "zeroed mode beyond the truncation");
    control = control.with_zero_adjoint_image(static_cast<std::size_t>(mode - 1));
  }
  spec.control = std::move(control);
  spec.validate();
  return spec;
}

IntegratorOptions make_integrator_options(const ExperimentConfig& cfg) {
  IntegratorOptions options;
  options.steps_per_delay = effective_steps_per_delay(cfg);
  return options;
}

SteeringConfig make_steering(const ExperimentConfig& cfg, const ProblemSpec& spec) {
  SteeringConfig steering;
  steering.deltas = effective_deltas(cfg);
  steering.alphas = effective_alphas(cfg);
  steering.epsilon = cfg.epsilon;
  steering.target = StateVector(spec.basis, make_profile(cfg.target, spec.basis->size()));
  const auto control_dim = spec.control.control_dim();
  if (cfg.base_control == "constant") {
    Eigen::VectorXd value = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(control_dim));
    for (std::size_t i = 0; i < cfg.base_control_value.size() && i < control_dim; ++i)
      value[static_cast<Eigen::Index>(i)] = cfg.base_control_value[i];
    steering.base_control = constant_control(std::move(value));
  } else {
    steering.base_control = zero_control(control_dim);
  }
  steering.integrator = make_integrator_options(cfg);
  steering.validate(spec);
  return steering;
}

}  // namespace apxctl
