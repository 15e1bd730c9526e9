#include "apxctl/error.hpp"
#include "apxctl/spectral.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace apxctl;

namespace {

StateVector make_state(const BasisPtr& basis, std::initializer_list<double> values) {
  Eigen::VectorXd c(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) c[i++] = v;
  return StateVector(basis, c);
}

}  // namespace

TEST_CASE("spectral: heat-1d eigenvalues are j^2 with simple multiplicity") {
  const auto basis = SpectralBasis::heat_1d(8);
  REQUIRE(basis->size() == 8);
  CHECK(basis->distinct_count() == 8);
  for (std::size_t j = 0; j < 8; ++j) {
    CHECK(basis->eigenvalues()[static_cast<Eigen::Index>(j)] == static_cast<double>((j + 1) * (j + 1)));
    CHECK(basis->multiplicities()[j] == 1);
  }
  CHECK(basis->decay_estimate().constant == 1.0);
  CHECK(basis->decay_estimate().rate == 1.0);
}

TEST_CASE("spectral: heat-2d keeps only complete eigenspaces") {
  // brute-force census of p^2 + q^2 with p, q >= 1
  std::map<int, int> census;
  for (int p = 1; p < 40; ++p)
    for (int q = 1; q < 40; ++q) ++census[p * p + q * q];

  for (std::size_t budget : {1u, 2u, 3u, 16u, 32u, 50u}) {
    std::size_t expected = 0;
    std::vector<int> expected_mult;
    for (const auto& [value, count] : census) {
      if (expected + static_cast<std::size_t>(count) > budget) break;
      expected += static_cast<std::size_t>(count);
      expected_mult.push_back(count);
    }
    const auto basis = SpectralBasis::heat_2d(budget);
    CHECK(basis->size() == expected);
    CHECK(basis->multiplicities() == expected_mult);
  }
  const auto basis = SpectralBasis::heat_2d(16);
  CHECK(basis->size() == 15);
  CHECK(basis->distinct_eigenvalues().front() == 2.0);
  CHECK(basis->multiplicities()[1] == 2);  // lambda = 5: (1,2) and (2,1)
}

TEST_CASE("spectral: unknown preset is a validation error") {
  try {
    SpectralBasis::from_preset("wave-3d", 4);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::validation);
  }
}

TEST_CASE("spectral: semigroup examples") {
  const auto single = SpectralBasis::from_spectrum({1.0}, {1});
  const auto z = make_state(single, {1.0});
  CHECK(semigroup_apply(std::log(2.0), z).coeffs()[0] == doctest::Approx(0.5).epsilon(1e-15));

  const auto basis = SpectralBasis::heat_1d(8);
  oracle::Random rng(11);
  const StateVector x(basis, rng.vector(8));
  CHECK(semigroup_apply(0.0, x).coeffs() == x.coeffs());
  const auto out = semigroup_apply(0.3, x).coeffs();
  for (int j = 1; j <= 8; ++j)
    CHECK(out[j - 1] == doctest::Approx(std::exp(-j * j * 0.3) * x.coeffs()[j - 1]).epsilon(1e-15));
}

TEST_CASE("spectral: fractional power examples") {
  const auto two = SpectralBasis::from_spectrum({1.0, 4.0}, {1, 1});
  const auto out = fractional_power_apply(1.0, make_state(two, {1.0, 1.0})).coeffs();
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 4.0);
  const auto four = SpectralBasis::from_spectrum({4.0}, {1});
  CHECK(fractional_power_apply(0.5, make_state(four, {3.0})).coeffs()[0] == doctest::Approx(6.0));

  const auto basis = SpectralBasis::heat_1d(8);
  oracle::Random rng(12);
  const StateVector x(basis, rng.vector(8));
  const auto p = fractional_power_apply(0.3, x).coeffs();
  for (int j = 1; j <= 8; ++j)
    CHECK(p[j - 1] == doctest::Approx(std::pow(j * j, 0.3) * x.coeffs()[j - 1]).epsilon(1e-14));

  CHECK_THROWS_AS(fractional_power_apply(0.0, x), Error);
  CHECK_THROWS_AS(fractional_power_apply(1.5, x), Error);
}

TEST_CASE("spectral: beta norm examples") {
  const auto plain = SpectralBasis::from_spectrum({1.0, 2.0}, {1, 1});
  CHECK(beta_norm(0.0, make_state(plain, {3.0, 4.0})) == 5.0);
  CHECK(beta_norm(1.0, make_state(plain, {1.0, 1.0})) == doctest::Approx(std::sqrt(5.0)));
  const auto quart = SpectralBasis::from_spectrum({1.0, 4.0}, {1, 1});
  CHECK(beta_norm(0.5, make_state(quart, {1.0, 1.0})) == doctest::Approx(std::sqrt(5.0)));

  const auto basis = SpectralBasis::heat_1d(8);
  oracle::Random rng(13);
  const StateVector x(basis, rng.vector(8));
  for (double beta : {0.1, 0.5, 0.9}) {
    double sum = 0.0;
    for (int j = 1; j <= 8; ++j) sum += std::pow(j * j, 2.0 * beta) * x.coeffs()[j - 1] * x.coeffs()[j - 1];
    CHECK(beta_norm(beta, x) == doctest::Approx(std::sqrt(sum)).epsilon(1e-14));
  }
  CHECK(beta_norm(0.0, x) == x.coeffs().norm());
}

TEST_CASE("spectral: semigroup law, self-adjointness, commutation, monotone decay") {
  const auto basis = SpectralBasis::heat_1d(16);
  oracle::Random rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const StateVector x(basis, rng.vector(16));
    const StateVector y(basis, rng.vector(16));
    const double t = rng.uniform(0.0, 1.0), s = rng.uniform(0.0, 1.0);
    const auto lhs = semigroup_apply(t + s, x).coeffs();
    const auto rhs = semigroup_apply(t, semigroup_apply(s, x)).coeffs();
    CHECK((lhs - rhs).norm() <= 1e-12 * x.norm());
    CHECK(std::abs(inner_product(semigroup_apply(t, x), y) - inner_product(x, semigroup_apply(t, y))) <= 1e-12);
    const double beta = rng.uniform(0.05, 1.0);
    const auto a = fractional_power_apply(beta, semigroup_apply(t, x)).coeffs();
    const auto b = semigroup_apply(t, fractional_power_apply(beta, x)).coeffs();
    CHECK((a - b).norm() <= 1e-12 * std::max(1.0, b.norm()));
    CHECK(semigroup_apply(std::max(t, s), x).norm() <= semigroup_apply(std::min(t, s), x).norm());
  }
}

TEST_CASE("spectral: decay bound audit") {
  const auto basis = SpectralBasis::heat_1d(8);
  const std::vector<double> zero_time{0.0};
  oracle::Random rng(15);
  const std::vector<StateVector> one{StateVector(basis, rng.vector(8))};
  CHECK(decay_bound_check(*basis, zero_time, one).max_ratio <= 1.0);

  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(8);
  e1[0] = 1.0;
  const std::vector<double> unit_time{1.0};
  const std::vector<StateVector> lowest{StateVector(basis, e1)};
  const auto tight = decay_bound_check(*basis, unit_time, lowest);
  CHECK(tight.holds);
  CHECK(tight.max_ratio == doctest::Approx(1.0).epsilon(1e-14));

  std::vector<double> times;
  std::vector<StateVector> states;
  for (int i = 0; i < 100; ++i) {
    times.push_back(rng.uniform(0.0, 3.0));
    states.emplace_back(basis, rng.vector(8));
  }
  const auto sweep = decay_bound_check(*basis, times, states);
  CHECK(sweep.holds);
  CHECK(sweep.violations.empty());
  CHECK(sweep.max_ratio <= 1.0 + 1e-15);
}

TEST_CASE("spectral: restricted inner products match quadrature of the sine modes") {
  const auto basis = SpectralBasis::heat_1d(6);
  Box box;
  box.lo[0] = 0.4;
  box.hi[0] = 1.7;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      const int p = static_cast<int>(i) + 1, q = static_cast<int>(j) + 1;
      const double ref = oracle::integrate(
          [&](double x) { return 2.0 / M_PI * std::sin(p * x) * std::sin(q * x); }, box.lo[0], box.hi[0]);
      CHECK(basis->restricted_inner_product(i, j, box) == doctest::Approx(ref).epsilon(1e-12).scale(1.0));
    }

  const auto plane = SpectralBasis::heat_2d(10);
  Box square;
  square.lo[0] = 0.2;
  square.hi[0] = 1.3;
  square.lo[1] = 0.9;
  square.hi[1] = 2.5;
  for (std::size_t i = 0; i < plane->size(); ++i)
    for (std::size_t j = 0; j < plane->size(); ++j) {
      const auto& a = plane->modes()[i].wave_numbers;
      const auto& b = plane->modes()[j].wave_numbers;
      double ref = 1.0;
      for (int d = 0; d < 2; ++d)
        ref *= oracle::integrate([&](double x) { return 2.0 / M_PI * std::sin(a[d] * x) * std::sin(b[d] * x); },
                                 square.lo[d], square.hi[d]);
      CHECK(plane->restricted_inner_product(i, j, square) == doctest::Approx(ref).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("spectral: full-domain restriction is the identity") {
  const auto basis = SpectralBasis::heat_1d(5);
  Box all;
  all.hi[0] = M_PI;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      CHECK(basis->restricted_inner_product(i, j, all) == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0));
}
