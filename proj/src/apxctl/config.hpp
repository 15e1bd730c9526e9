#pragma once

// Experiment configuration: one JSON document per experiment with sections
// basis / problem / control / steering / integrator / output. Every section
// and key is optional; defaults are documented in README.md.

#include "apxctl/dynamics.hpp"
#include "apxctl/steering.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace apxctl {

struct ImpulseConfig {
  double time = 0.0;
  std::string tag = "fixed";  // fixed | proportional
  std::vector<double> jump;
  double gain = 0.0;
  bool operator==(const ImpulseConfig&) const = default;
};

/// Named coefficient profile: smooth (amplitude / i^2), low_mode (amplitude
/// on the first mode), high_mode (energy spread over the upper half of the
/// modes), or coefficients (explicit list, zero-padded).
struct ProfileConfig {
  std::string tag = "smooth";
  double amplitude = 1.0;
  std::vector<double> coefficients;
  bool operator==(const ProfileConfig&) const = default;
};

struct ExperimentConfig {
  // basis
  std::string preset = "heat-1d";
  std::size_t modes = 32;
  // problem
  double memory_gain = 0.0;
  double nonlinear_gain = 0.0;
  double delay = 0.2;
  double horizon = 1.0;
  std::string nonlinearity = "F_zero";
  double sigmoid_scale = 1.0;
  double power_exponent = 2.0;
  double power_cap = 1.0;
  std::string memory = "M_zero";
  double memory_rate = 1.0;
  std::vector<ImpulseConfig> impulses;
  ProfileConfig history{"smooth", 1.0, {}};
  std::string history_shape = "constant";
  double growth_coefficient = 1.0;
  double growth_exponent = 1.0;
  double growth_offset = 0.0;
  // control operator
  std::string control_operator = "identity";  // identity | restriction
  std::vector<double> box{0.0, 1.0, 0.0, 1.0};  // x0, x1, y0, y1 inside [0, pi]
  std::vector<int> zero_adjoint_modes;          // 1-based mode positions
  // steering
  std::vector<double> deltas;  // empty: {r/2, r/4, r/8} inside (0, tau - t_p)
  std::vector<double> alphas;  // empty: 2^-1 ... 2^-14
  double epsilon = 1e-2;
  ProfileConfig target{"low_mode", 0.5, {}};
  std::string base_control = "zero";  // zero | constant
  std::vector<double> base_control_value;
  // integrator
  int steps_per_delay = 0;  // 0: smallest count with h <= 1e-3 tau
  // output
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates; throws Error(validation) carrying every violation,
/// or a parse error with line and column.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");
ExperimentConfig load_config(const std::string& path);

/// Every violated rule, empty when the config is runnable.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

std::string emit_config(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

int effective_steps_per_delay(const ExperimentConfig& cfg);
std::vector<double> effective_deltas(const ExperimentConfig& cfg);
std::vector<double> effective_alphas(const ExperimentConfig& cfg);

BasisPtr make_basis(const ExperimentConfig& cfg);
Eigen::VectorXd make_profile(const ProfileConfig& profile, std::size_t modes);
ProblemSpec make_problem(const ExperimentConfig& cfg, const BasisPtr& basis);
SteeringConfig make_steering(const ExperimentConfig& cfg, const ProblemSpec& spec);
IntegratorOptions make_integrator_options(const ExperimentConfig& cfg);

}  // namespace apxctl
