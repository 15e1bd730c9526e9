#include "apxctl.h"

#include "apxctl/config.hpp"
#include "apxctl/error.hpp"
#include "apxctl/gramian.hpp"
#include "apxctl/runner.hpp"

#include <new>
#include <string>

#ifndef APXCTL_VERSION_STRING
#define APXCTL_VERSION_STRING "0.0.0"
#endif

struct apxctl_config {
  apxctl::ExperimentConfig cfg;
  std::string emitted;
};

struct apxctl_report {
  apxctl::RunOutcome outcome;
};

struct apxctl_basis {
  apxctl::BasisPtr basis;
};

struct apxctl_gramian {
  apxctl::GramianMatrix q;
};

namespace {

thread_local std::string last_error;

apxctl_status to_status(apxctl::ErrorKind kind) {
  switch (kind) {
    case apxctl::ErrorKind::validation: return APXCTL_ERR_VALIDATION;
    case apxctl::ErrorKind::numerical: return APXCTL_ERR_NUMERICAL;
    case apxctl::ErrorKind::check_failed: return APXCTL_ERR_CHECK_FAILED;
    case apxctl::ErrorKind::invalid_argument: return APXCTL_ERR_ARGUMENT;
    case apxctl::ErrorKind::io: return APXCTL_ERR_IO;
    case apxctl::ErrorKind::internal: return APXCTL_ERR_INTERNAL;
  }
  return APXCTL_ERR_INTERNAL;
}

template <typename Fn>
apxctl_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const apxctl::Error& e) {
    last_error = e.what();
    return to_status(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return APXCTL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return APXCTL_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return APXCTL_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) apxctl::fail(apxctl::ErrorKind::invalid_argument, std::string(what) + " must not be NULL");
}

apxctl::ControlOperator control_from(const apxctl::SpectralBasis& basis, const double* b, size_t control_dim) {
  if (!b) return apxctl::ControlOperator::identity(basis);
  apxctl::require(control_dim > 0, "control dimension must be positive");
  const auto m = static_cast<Eigen::Index>(basis.size());
  const auto k = static_cast<Eigen::Index>(control_dim);
  Eigen::MatrixXd matrix(m, k);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < k; ++j) matrix(i, j) = b[i * k + j];
  return apxctl::ControlOperator(std::move(matrix));
}

Eigen::VectorXd copy_in(const apxctl_basis* basis, const double* z) {
  return Eigen::Map<const Eigen::VectorXd>(z, static_cast<Eigen::Index>(basis->basis->size()));
}

}  // namespace

extern "C" {

const char* apxctl_version(void) { return APXCTL_VERSION_STRING; }
const char* apxctl_last_error(void) { return last_error.c_str(); }

apxctl_status apxctl_config_load(const char* path, apxctl_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new apxctl_config{apxctl::load_config(path), {}};
    return APXCTL_OK;
  });
}

apxctl_status apxctl_config_parse(const char* text, apxctl_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new apxctl_config{apxctl::parse_config(text), {}};
    return APXCTL_OK;
  });
}

apxctl_status apxctl_config_override_alpha(apxctl_config* cfg, double alpha) {
  return guarded([&] {
    need(cfg, "cfg");
    apxctl::RunOptions options;
    options.alpha = alpha;
    cfg->cfg = apxctl::apply_overrides(cfg->cfg, options);
    return APXCTL_OK;
  });
}

apxctl_status apxctl_config_override_delta(apxctl_config* cfg, double delta) {
  return guarded([&] {
    need(cfg, "cfg");
    apxctl::RunOptions options;
    options.delta = delta;
    cfg->cfg = apxctl::apply_overrides(cfg->cfg, options);
    return APXCTL_OK;
  });
}

apxctl_status apxctl_config_set_output_dir(apxctl_config* cfg, const char* dir) {
  return guarded([&] {
    need(cfg, "cfg");
    need(dir, "dir");
    cfg->cfg.output_dir = dir;
    return APXCTL_OK;
  });
}

apxctl_status apxctl_config_emit(apxctl_config* cfg, const char** text) {
  return guarded([&] {
    need(cfg, "cfg");
    need(text, "text");
    cfg->emitted = apxctl::emit_config(cfg->cfg);
    *text = cfg->emitted.c_str();
    return APXCTL_OK;
  });
}

apxctl_status apxctl_config_hash(const apxctl_config* cfg, unsigned long long* hash) {
  return guarded([&] {
    need(cfg, "cfg");
    need(hash, "hash");
    *hash = apxctl::config_hash(cfg->cfg);
    return APXCTL_OK;
  });
}

void apxctl_config_free(apxctl_config* cfg) { delete cfg; }

apxctl_status apxctl_run(const apxctl_config* cfg, const char* verb, const char* out_dir, unsigned jobs,
                         apxctl_report** report) {
  return guarded([&] {
    need(cfg, "cfg");
    need(verb, "verb");
    need(report, "report");
    *report = nullptr;
    apxctl::RunOptions options;
    if (out_dir) options.out_dir = out_dir;
    options.jobs = jobs == 0 ? 1 : jobs;
    auto* r = new apxctl_report{apxctl::run_verb(verb, cfg->cfg, options)};
    *report = r;
    if (r->outcome.exit_code != 0) {
      last_error = "check suite reported failures";
      return APXCTL_ERR_CHECK_FAILED;
    }
    return APXCTL_OK;
  });
}

const char* apxctl_report_text(const apxctl_report* report) { return report ? report->outcome.report.c_str() : ""; }
int apxctl_report_warning(const apxctl_report* report) { return report && report->outcome.warning ? 1 : 0; }
size_t apxctl_report_file_count(const apxctl_report* report) { return report ? report->outcome.files.size() : 0; }
const char* apxctl_report_file(const apxctl_report* report, size_t index) {
  if (!report || index >= report->outcome.files.size()) return nullptr;
  return report->outcome.files[index].c_str();
}
void apxctl_report_free(apxctl_report* report) { delete report; }

apxctl_status apxctl_basis_create(const char* preset, size_t modes, apxctl_basis** out) {
  return guarded([&] {
    need(preset, "preset");
    need(out, "out");
    *out = new apxctl_basis{apxctl::SpectralBasis::from_preset(preset, modes)};
    return APXCTL_OK;
  });
}

size_t apxctl_basis_size(const apxctl_basis* basis) { return basis ? basis->basis->size() : 0; }

apxctl_status apxctl_basis_eigenvalues(const apxctl_basis* basis, double* out, size_t capacity) {
  return guarded([&] {
    need(basis, "basis");
    need(out, "out");
    const auto& lambda = basis->basis->eigenvalues();
    for (size_t i = 0; i < capacity && i < basis->basis->size(); ++i) out[i] = lambda[static_cast<Eigen::Index>(i)];
    return APXCTL_OK;
  });
}

apxctl_status apxctl_basis_semigroup_apply(const apxctl_basis* basis, double t, const double* z, double* out) {
  return guarded([&] {
    need(basis, "basis");
    need(z, "z");
    need(out, "out");
    const apxctl::StateVector result = apxctl::semigroup_apply(t, apxctl::StateVector(basis->basis, copy_in(basis, z)));
    for (Eigen::Index i = 0; i < result.coeffs().size(); ++i) out[i] = result.coeffs()[i];
    return APXCTL_OK;
  });
}

apxctl_status apxctl_basis_beta_norm(const apxctl_basis* basis, double beta, const double* z, double* out) {
  return guarded([&] {
    need(basis, "basis");
    need(z, "z");
    need(out, "out");
    *out = apxctl::beta_norm(beta, apxctl::StateVector(basis->basis, copy_in(basis, z)));
    return APXCTL_OK;
  });
}

void apxctl_basis_free(apxctl_basis* basis) { delete basis; }

apxctl_status apxctl_gramian_assemble(const apxctl_basis* basis, const double* b, size_t control_dim, double horizon,
                                      double delta, apxctl_gramian** out) {
  return guarded([&] {
    need(basis, "basis");
    need(out, "out");
    const auto control = control_from(*basis->basis, b, control_dim);
    *out = new apxctl_gramian{apxctl::assemble_gramian(*basis->basis, control, apxctl::TimeWindow{horizon, delta})};
    return APXCTL_OK;
  });
}

size_t apxctl_gramian_size(const apxctl_gramian* q) { return q ? q->q.size() : 0; }

apxctl_status apxctl_gramian_eigen_range(const apxctl_gramian* q, double* min_eigenvalue, double* max_eigenvalue) {
  return guarded([&] {
    need(q, "q");
    if (min_eigenvalue) *min_eigenvalue = q->q.min_eigenvalue();
    if (max_eigenvalue) *max_eigenvalue = q->q.max_eigenvalue();
    return APXCTL_OK;
  });
}

apxctl_status apxctl_gramian_entries(const apxctl_gramian* q, double* out) {
  return guarded([&] {
    need(q, "q");
    need(out, "out");
    const auto& e = q->q.entries();
    for (Eigen::Index i = 0; i < e.rows(); ++i)
      for (Eigen::Index j = 0; j < e.cols(); ++j) out[i * e.cols() + j] = e(i, j);
    return APXCTL_OK;
  });
}

apxctl_status apxctl_gramian_regularized_solve(const apxctl_gramian* q, double alpha, const double* w, double* y) {
  return guarded([&] {
    need(q, "q");
    need(w, "w");
    need(y, "y");
    apxctl::require(alpha > 0.0, "alpha must be positive");
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(w, static_cast<Eigen::Index>(q->q.size()));
    const auto solve = apxctl::regularized_resolve(alpha, q->q, rhs);
    for (Eigen::Index i = 0; i < solve.solution.size(); ++i) y[i] = solve.solution[i];
    return APXCTL_OK;
  });
}

void apxctl_gramian_free(apxctl_gramian* q) { delete q; }

apxctl_status apxctl_check_h1(const apxctl_basis* basis, const double* b, size_t control_dim, int* holds,
                              size_t* rank) {
  return guarded([&] {
    need(basis, "basis");
    const auto report = apxctl::check_h1(*basis->basis, control_from(*basis->basis, b, control_dim));
    if (holds) *holds = report.holds ? 1 : 0;
    if (rank) *rank = report.rank;
    return APXCTL_OK;
  });
}

}  // extern "C"
