#include "apxctl/config.hpp"
#include "apxctl/error.hpp"
#include "apxctl/runner.hpp"

#include <doctest.h>

#include <string>

using namespace apxctl;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::validation);
    return e.what();
  }
  return {};
}

const char* minimal_linear = R"({
  "basis": {"preset": "heat-1d", "modes": 8},
  "problem": {"delay": 0.4, "horizon": 1.0},
  "steering": {"deltas": [0.2], "alphas": [0.5, 0.25]}
})";

}  // namespace

TEST_CASE("config: minimal linear experiment is valid and keeps defaults") {
  const auto cfg = parse_config(minimal_linear);
  CHECK(cfg.modes == 8);
  CHECK(cfg.delay == 0.4);
  CHECK(cfg.nonlinearity == "F_zero");
  CHECK(cfg.memory == "M_zero");
  CHECK(cfg.epsilon == 1e-2);
  CHECK(validate_config(cfg).empty());
  const auto basis = make_basis(cfg);
  const auto spec = make_problem(cfg, basis);
  CHECK(spec.is_linear());
  CHECK(spec.control.is_identity());
}

TEST_CASE("config: effective defaults") {
  const auto cfg = parse_config("{}");
  CHECK(effective_steps_per_delay(cfg) == 200);  // h = r / 200 = 1e-3 tau
  const auto deltas = effective_deltas(cfg);
  REQUIRE(deltas.size() == 3);
  CHECK(deltas[0] == doctest::Approx(0.1));
  CHECK(deltas[2] == doctest::Approx(0.025));
  const auto alphas = effective_alphas(cfg);
  REQUIRE(alphas.size() == 14);
  CHECK(alphas.front() == 0.5);
  CHECK(alphas.back() == std::ldexp(1.0, -14));
}

TEST_CASE("config: delta at or above the delay is rejected") {
  const auto message = error_of(R"({"problem": {"delay": 0.2}, "steering": {"deltas": [0.2]}})");
  CHECK(message.find("delta < r") != std::string::npos);
}

TEST_CASE("config: impulse ordering is enforced") {
  const auto message = error_of(R"({"problem": {"impulses": [
      {"time": 0.5, "tag": "fixed", "jump": [1.0]},
      {"time": 0.3, "tag": "fixed", "jump": [1.0]}]}})");
  CHECK(message.find("strictly increasing") != std::string::npos);
}

TEST_CASE("config: every violation is listed") {
  const auto message = error_of(R"({
    "basis": {"preset": "heat-1d", "modes": 4},
    "problem": {"delay": 0.2, "nonlinearity": {"tag": "F_cubic"}, "memory": {"tag": "M_power"}},
    "steering": {"deltas": [0.3], "alphas": [0.5, 0.7], "epsilon": -1}
  })");
  for (const char* part : {"F_cubic", "M_power", "delta < r", "strictly decreasing", "epsilon"}) {
    CAPTURE(part);
    CHECK(message.find(part) != std::string::npos);
  }
  CHECK(message.find("5 violations") != std::string::npos);
}

TEST_CASE("config: unknown keys, tags and wrong types are rejected") {
  CHECK(error_of(R"({"basis": {"modes": 4, "mode": 3}})").find("basis.mode: unknown key") != std::string::npos);
  CHECK(error_of(R"({"plotting": {}})").find("unknown key") != std::string::npos);
  CHECK(error_of(R"({"basis": {"modes": "four"}})").find("expected an integer") != std::string::npos);
  CHECK(error_of(R"({"basis": {"preset": "wave"}})").find("unknown preset") != std::string::npos);
  CHECK(error_of(R"({"control": {"operator": "boundary"}})").find("boundary") != std::string::npos);
  CHECK(error_of(R"({"steering": {"target": {"tag": "spiky"}}})").find("spiky") != std::string::npos);
}

TEST_CASE("config: parse errors carry line and column") {
  const auto message = error_of("{\n  \"basis\": {\"modes\": 4,}\n}");
  CHECK(message.find("<string>:2:") != std::string::npos);
  CHECK(message.find("parse error") != std::string::npos);
}

TEST_CASE("config: emit and parse round trip") {
  for (const char* name : {"default.json", "linear.json", "semilinear.json", "rank_deficient.json"}) {
    CAPTURE(name);
    const auto cfg = load_config(std::string(APXCTL_CONFIG_DIR) + "/" + name);
    const auto again = parse_config(emit_config(cfg));
    CHECK(again == cfg);
    CHECK(emit_config(again) == emit_config(cfg));
    CHECK(config_hash(again) == config_hash(cfg));
  }
}

TEST_CASE("config: hash tracks content but not the output directory") {
  auto cfg = parse_config(minimal_linear);
  const auto h = config_hash(cfg);
  CHECK(config_hash(parse_config(minimal_linear)) == h);
  cfg.output_dir = "elsewhere";
  CHECK(config_hash(cfg) == h);
  cfg.epsilon = 0.02;
  CHECK(config_hash(cfg) != h);
}

TEST_CASE("config: command-line overrides revalidate") {
  const auto cfg = parse_config(minimal_linear);
  RunOptions options;
  options.alpha = 1e-3;
  options.delta = 0.1;
  options.out_dir = "tmp/out";
  const auto changed = apply_overrides(cfg, options);
  CHECK(changed.alphas == std::vector<double>{1e-3});
  CHECK(changed.deltas == std::vector<double>{0.1});
  CHECK(changed.output_dir == "tmp/out");

  RunOptions bad;
  bad.delta = 0.5;
  try {
    apply_overrides(cfg, bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::validation);
    CHECK(std::string(e.what()).find("delta < r") != std::string::npos);
  }
  CHECK_THROWS_AS(run_verb("launch", cfg), Error);
}

TEST_CASE("config: missing file") {
  try {
    load_config("/nonexistent/config.json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("cannot open") != std::string::npos);
  }
}

TEST_CASE("config: builders honour the control section") {
  auto cfg = parse_config(R"({"basis": {"modes": 6}, "control": {"zero_adjoint_modes": [2]},
                              "steering": {"deltas": [0.1]}})");
  const auto basis = make_basis(cfg);
  const auto spec = make_problem(cfg, basis);
  CHECK(spec.control.matrix().row(1).isZero(0.0));
  CHECK_FALSE(spec.control.is_identity());
  const auto profile = make_profile(ProfileConfig{"coefficients", 1.0, {1.0, 2.0}}, 4);
  CHECK(profile.size() == 4);
  CHECK(profile[1] == 2.0);
  CHECK(profile[3] == 0.0);
  CHECK(make_profile(ProfileConfig{"low_mode", 0.5, {}}, 3)[0] == 0.5);
}
