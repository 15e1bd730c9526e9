#include "apxctl.h"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

TEST_CASE("capi: version and basis queries") {
  CHECK(std::strlen(apxctl_version()) > 0);
  apxctl_basis* basis = nullptr;
  REQUIRE(apxctl_basis_create("heat-1d", 5, &basis) == APXCTL_OK);
  CHECK(apxctl_basis_size(basis) == 5);
  std::vector<double> lambda(5);
  REQUIRE(apxctl_basis_eigenvalues(basis, lambda.data(), lambda.size()) == APXCTL_OK);
  for (int j = 1; j <= 5; ++j) CHECK(lambda[j - 1] == j * j);

  const std::vector<double> z{1.0, -1.0, 0.5, 0.0, 2.0};
  std::vector<double> out(5);
  REQUIRE(apxctl_basis_semigroup_apply(basis, 0.2, z.data(), out.data()) == APXCTL_OK);
  for (int j = 1; j <= 5; ++j) CHECK(out[j - 1] == doctest::Approx(std::exp(-0.2 * j * j) * z[j - 1]));
  double norm = 0.0;
  REQUIRE(apxctl_basis_beta_norm(basis, 0.5, z.data(), &norm) == APXCTL_OK);
  double expected = 0.0;
  for (int j = 1; j <= 5; ++j) expected += j * j * z[j - 1] * z[j - 1];
  CHECK(norm == doctest::Approx(std::sqrt(expected)));
  apxctl_basis_free(basis);
}

TEST_CASE("capi: errors map to status codes with a message") {
  apxctl_basis* basis = nullptr;
  CHECK(apxctl_basis_create("wave-3d", 4, &basis) == APXCTL_ERR_VALIDATION);
  CHECK(basis == nullptr);
  CHECK(std::string(apxctl_last_error()).find("wave-3d") != std::string::npos);
  CHECK(apxctl_basis_create(nullptr, 4, &basis) == APXCTL_ERR_ARGUMENT);

  apxctl_config* cfg = nullptr;
  CHECK(apxctl_config_load("/nonexistent.json", &cfg) == APXCTL_ERR_VALIDATION);
  CHECK(std::string(apxctl_last_error()).find("cannot open") != std::string::npos);
  CHECK(apxctl_config_parse("{\"problem\": {\"delay\": 0.2}, \"steering\": {\"deltas\": [0.4]}}", &cfg) ==
        APXCTL_ERR_VALIDATION);
  CHECK(std::string(apxctl_last_error()).find("delta < r") != std::string::npos);
}

TEST_CASE("capi: gramian assembly, spectrum and regularized solve") {
  apxctl_basis* basis = nullptr;
  REQUIRE(apxctl_basis_create("heat-1d", 1, &basis) == APXCTL_OK);
  apxctl_gramian* q = nullptr;
  REQUIRE(apxctl_gramian_assemble(basis, nullptr, 0, 1.0, std::log(2.0), &q) == APXCTL_OK);
  CHECK(apxctl_gramian_size(q) == 1);
  double entry = 0.0;
  REQUIRE(apxctl_gramian_entries(q, &entry) == APXCTL_OK);
  CHECK(entry == doctest::Approx(0.375));
  const double w = 1.0;
  double y = 0.0;
  REQUIRE(apxctl_gramian_regularized_solve(q, 0.125, &w, &y) == APXCTL_OK);
  CHECK(y == doctest::Approx(2.0));
  CHECK(apxctl_gramian_regularized_solve(q, 0.0, &w, &y) == APXCTL_ERR_ARGUMENT);
  apxctl_gramian_free(q);
  apxctl_basis_free(basis);

  REQUIRE(apxctl_basis_create("heat-1d", 3, &basis) == APXCTL_OK);
  // row-major 3x2 operator
  const std::vector<double> b{1.0, 0.0, 0.0, 1.0, 1.0, 1.0};
  REQUIRE(apxctl_gramian_assemble(basis, b.data(), 2, 1.0, 0.5, &q) == APXCTL_OK);
  std::vector<double> entries(9);
  REQUIRE(apxctl_gramian_entries(q, entries.data()) == APXCTL_OK);
  // Q_01 = <b_0, b_1> (1 - exp(-5 delta)) / 5 with b_0 = (1, 0), b_1 = (0, 1)
  CHECK(entries[1] == 0.0);
  CHECK(entries[2] == doctest::Approx((1.0 - std::exp(-10.0 * 0.5)) / 10.0));
  CHECK(entries[2] == entries[6]);
  double lo = 0.0, hi = 0.0;
  REQUIRE(apxctl_gramian_eigen_range(q, &lo, &hi) == APXCTL_OK);
  CHECK(lo > 0.0);
  CHECK(hi >= lo);
  apxctl_gramian_free(q);

  int holds = -1;
  size_t rank = 0;
  REQUIRE(apxctl_check_h1(basis, b.data(), 2, &holds, &rank) == APXCTL_OK);
  CHECK(holds == 0);  // three modes, two-dimensional control
  CHECK(rank == 2);
  REQUIRE(apxctl_check_h1(basis, nullptr, 0, &holds, &rank) == APXCTL_OK);
  CHECK(holds == 1);
  CHECK(rank == 3);
  apxctl_basis_free(basis);
}

TEST_CASE("capi: config round trip, hash and overrides") {
  apxctl_config* cfg = nullptr;
  REQUIRE(apxctl_config_load(APXCTL_CONFIG_DIR "/linear.json", &cfg) == APXCTL_OK);
  const char* text = nullptr;
  REQUIRE(apxctl_config_emit(cfg, &text) == APXCTL_OK);
  apxctl_config* again = nullptr;
  REQUIRE(apxctl_config_parse(text, &again) == APXCTL_OK);
  unsigned long long h1 = 0, h2 = 0;
  REQUIRE(apxctl_config_hash(cfg, &h1) == APXCTL_OK);
  REQUIRE(apxctl_config_hash(again, &h2) == APXCTL_OK);
  CHECK(h1 == h2);
  REQUIRE(apxctl_config_override_alpha(again, 1e-3) == APXCTL_OK);
  REQUIRE(apxctl_config_hash(again, &h2) == APXCTL_OK);
  CHECK(h1 != h2);
  CHECK(apxctl_config_override_delta(again, 0.9) == APXCTL_ERR_VALIDATION);
  apxctl_config_free(again);
  apxctl_config_free(cfg);
}

TEST_CASE("capi: running the gramian verb on a rank-deficient operator sets the warning") {
  apxctl_config* cfg = nullptr;
  REQUIRE(apxctl_config_load(APXCTL_CONFIG_DIR "/rank_deficient.json", &cfg) == APXCTL_OK);
  const auto dir = std::filesystem::temp_directory_path() / "apxctl_capi_gramian";
  std::filesystem::remove_all(dir);
  apxctl_report* report = nullptr;
  REQUIRE(apxctl_run(cfg, "gramian", dir.string().c_str(), 1, &report) == APXCTL_OK);
  CHECK(apxctl_report_warning(report) == 1);
  CHECK(std::string(apxctl_report_text(report)).size() > 0);
  REQUIRE(apxctl_report_file_count(report) >= 2);
  for (size_t i = 0; i < apxctl_report_file_count(report); ++i)
    CHECK(std::filesystem::exists(dir / apxctl_report_file(report, i)));
  CHECK(apxctl_report_file(report, 1000) == nullptr);
  CHECK(std::filesystem::exists(dir / "manifest.json"));
  apxctl_report_free(report);

  CHECK(apxctl_run(cfg, "launch", nullptr, 1, &report) == APXCTL_ERR_ARGUMENT);
  CHECK(report == nullptr);
  apxctl_config_free(cfg);
  std::filesystem::remove_all(dir);
}
