// apxctl VERB --config PATH [--out DIR] [--jobs N] [--alpha X] [--delta X]
//
// Exit codes: 0 success, 1 validation failure, 2 numerical failure,
// 3 check-suite failure, 4 bad arguments, 5 I/O error.

#include "apxctl.h"

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"Approximate controllability experiments for impulsive delay systems"};
  app.set_version_flag("--version", std::string(apxctl_version()));

  std::string verb, config_path;
  std::optional<std::string> out_dir;
  std::optional<double> alpha, delta;
  unsigned jobs = 1;
  app.add_option("verb", verb, "simulate | steer | sweep | gramian | check")
      ->required()
      ->check(CLI::IsMember({"simulate", "steer", "sweep", "gramian", "check"}));
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--jobs", jobs, "parallel sweep workers")->check(CLI::Range(1u, 1024u));
  app.add_option("--alpha", alpha, "run a single alpha instead of the ladder");
  app.add_option("--delta", delta, "run a single delta instead of the ladder");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : APXCTL_ERR_ARGUMENT;
  }

  apxctl_config* cfg = nullptr;
  apxctl_status status = apxctl_config_load(config_path.c_str(), &cfg);
  if (status == APXCTL_OK && alpha) status = apxctl_config_override_alpha(cfg, *alpha);
  if (status == APXCTL_OK && delta) status = apxctl_config_override_delta(cfg, *delta);
  if (status != APXCTL_OK) {
    std::fprintf(stderr, "apxctl: %s\n", apxctl_last_error());
    apxctl_config_free(cfg);
    return status;
  }

  apxctl_report* report = nullptr;
  status = apxctl_run(cfg, verb.c_str(), out_dir ? out_dir->c_str() : nullptr, jobs, &report);
  if (report) {
    std::fputs(apxctl_report_text(report), stdout);
    if (apxctl_report_warning(report)) std::fputs("apxctl: warning flag set in report\n", stderr);
  }
  if (status != APXCTL_OK) std::fprintf(stderr, "apxctl: %s\n", apxctl_last_error());
  apxctl_report_free(report);
  apxctl_config_free(cfg);
  return status;
}
