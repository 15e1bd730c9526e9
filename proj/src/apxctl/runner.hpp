#pragma once

// Verb dispatch for the command line: simulate | steer | sweep | gramian |
// check. Every verb writes its artifacts under the output directory together
// with manifest.json; the CSV bodies depend only on the configuration.

#include "apxctl/config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace apxctl {

struct RunOptions {
  std::optional<std::string> out_dir;  // overrides output.dir
  unsigned jobs = 1;
  std::optional<double> alpha;  // replaces the alpha ladder
  std::optional<double> delta;  // replaces the delta ladder
};

struct RunOutcome {
  int exit_code = 0;  // 0, or 3 when a check failed
  bool warning = false;
  std::string report;  // human-readable summary for stdout
  std::vector<std::string> files;
};

const std::vector<std::string>& known_verbs();

/// Applies the overrides and revalidates; throws Error(validation).
ExperimentConfig apply_overrides(ExperimentConfig cfg, const RunOptions& options);

RunOutcome run_verb(const std::string& verb, const ExperimentConfig& cfg, const RunOptions& options = {});

}  // namespace apxctl
