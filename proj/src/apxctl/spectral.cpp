#include "apxctl/spectral.hpp"

#include "apxctl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <tuple>

namespace apxctl {

namespace {

void assert_conforms(const StateVector& z) {
  require(z.basis() != nullptr, "state vector has no basis");
  require(z.size() == z.basis()->size(), "state vector length does not match basis truncation");
  require(z.coeffs().allFinite(), "state vector has non-finite coefficients");
}

// (2/pi) * int_a^b sin(i x) sin(j x) dx, the 1-D normalized mode overlap.
double sine_overlap(int i, int j, double a, double b) {
  auto cos_integral = [a, b](int k) {
    if (k == 0) return b - a;
    return (std::sin(k * b) - std::sin(k * a)) / k;
  };
  return (cos_integral(std::abs(i - j)) - cos_integral(i + j)) / std::numbers::pi;
}

}  // namespace

SpectralBasis::SpectralBasis(std::string preset, int dimension, std::vector<Mode> modes)
    : preset_(std::move(preset)), dimension_(dimension), modes_(std::move(modes)) {
  require(!modes_.empty(), "spectral basis needs at least one mode");
  std::sort(modes_.begin(), modes_.end(), [](const Mode& x, const Mode& y) {
    return std::tie(x.eigenvalue, x.multiplicity_index) < std::tie(y.eigenvalue, y.multiplicity_index);
  });
  lambda_.resize(static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const double lambda = modes_[i].eigenvalue;
    require(std::isfinite(lambda) && lambda > 0.0, "eigenvalues must be positive and finite");
    if (distinct_.empty() || lambda != distinct_.back()) {
      distinct_.push_back(lambda);
      multiplicity_.push_back(0);
    }
    ++multiplicity_.back();
    modes_[i].eigen_index = static_cast<int>(distinct_.size());
    modes_[i].multiplicity_index = multiplicity_.back();
    lambda_[static_cast<Eigen::Index>(i)] = lambda;
  }
}

std::shared_ptr<const SpectralBasis> SpectralBasis::heat_1d(std::size_t modes) {
  require(modes >= 1, "heat-1d needs at least one mode");
  std::vector<Mode> list;
  for (std::size_t j = 1; j <= modes; ++j) {
    const int n = static_cast<int>(j);
    list.push_back(Mode{n, 1, static_cast<double>(n) * n, {n}});
  }
  return std::shared_ptr<const SpectralBasis>(new SpectralBasis("heat-1d", 1, std::move(list)));
}

std::shared_ptr<const SpectralBasis> SpectralBasis::heat_2d(std::size_t max_modes) {
  require(max_modes >= 1, "heat-2d needs at least one mode");
  // Enumerate p^2 + q^2 far enough that every eigenspace below the cutoff is
  // complete: an eigenvalue v needs p, q <= sqrt(v).
  std::map<int, std::vector<std::pair<int, int>>> spaces;
  const int reach = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(max_modes)))) * 2 + 4;
  for (int p = 1; p <= reach; ++p)
    for (int q = 1; q <= reach; ++q) spaces[p * p + q * q].emplace_back(p, q);
  const int safe_limit = reach * reach + 1;

  std::vector<Mode> list;
  for (const auto& [value, members] : spaces) {
    require(value <= safe_limit, "heat-2d enumeration overflow");
    if (list.size() + members.size() > max_modes) break;
    for (const auto& [p, q] : members) list.push_back(Mode{0, 0, static_cast<double>(value), {p, q}});
  }
  return std::shared_ptr<const SpectralBasis>(new SpectralBasis("heat-2d", 2, std::move(list)));
}

std::shared_ptr<const SpectralBasis> SpectralBasis::from_spectrum(std::vector<double> eigenvalues,
                                                                 std::vector<int> multiplicities) {
  require(eigenvalues.size() == multiplicities.size(), "need one multiplicity per eigenvalue");
  std::vector<Mode> list;
  for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
    require(multiplicities[j] >= 1, "multiplicities must be >= 1");
    if (j > 0) require(eigenvalues[j] > eigenvalues[j - 1], "eigenvalues must be strictly increasing");
    for (int k = 0; k < multiplicities[j]; ++k) list.push_back(Mode{0, k + 1, eigenvalues[j], {}});
  }
  return std::shared_ptr<const SpectralBasis>(new SpectralBasis("custom", 0, std::move(list)));
}

std::shared_ptr<const SpectralBasis> SpectralBasis::from_preset(const std::string& name,
                                                               std::size_t modes) {
  if (name == "heat-1d") return heat_1d(modes);
  if (name == "heat-2d") return heat_2d(modes);
  fail(ErrorKind::validation, "unknown spectral preset '" + name + "'");
}

Eigen::VectorXd SpectralBasis::semigroup_factors(double t) const {
  return (-lambda_.array() * t).exp().matrix();
}

bool SpectralBasis::same_as(const SpectralBasis& other) const {
  return this == &other || (preset_ == other.preset_ && lambda_.size() == other.lambda_.size() &&
                            lambda_ == other.lambda_);
}

double SpectralBasis::restricted_inner_product(std::size_t i, std::size_t j, const Box& box) const {
  require(dimension_ >= 1, "restriction operators need a preset with spatial modes");
  require(i < size() && j < size(), "mode index out of range");
  double value = 1.0;
  for (int d = 0; d < dimension_; ++d) {
    value *= sine_overlap(modes_[i].wave_numbers[d], modes_[j].wave_numbers[d], box.lo[d], box.hi[d]);
  }
  return value;
}

StateVector::StateVector(BasisPtr basis, Eigen::VectorXd coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  require(basis_ != nullptr, "state vector needs a basis");
  require(static_cast<std::size_t>(coeffs_.size()) == basis_->size(),
          "state vector length does not match basis truncation");
}

StateVector StateVector::zeros(BasisPtr basis) {
  const auto n = static_cast<Eigen::Index>(basis->size());
  return StateVector(std::move(basis), Eigen::VectorXd::Zero(n));
}

StateVector semigroup_apply(double t, const StateVector& z) {
  require(std::isfinite(t) && t >= 0.0, "semigroup time must be nonnegative");
  assert_conforms(z);
  return StateVector(z.basis(), z.basis()->semigroup_factors(t).cwiseProduct(z.coeffs()));
}

StateVector fractional_power_apply(double beta, const StateVector& z) {
  require(beta > 0.0 && beta <= 1.0, "fractional power exponent must lie in (0, 1]");
  assert_conforms(z);
  const Eigen::ArrayXd scale = z.basis()->eigenvalues().array().pow(beta);
  return StateVector(z.basis(), (scale * z.coeffs().array()).matrix());
}

double beta_norm(double beta, const StateVector& z) {
  require(beta >= 0.0 && beta <= 1.0, "graph-norm exponent must lie in [0, 1]");
  assert_conforms(z);
  if (beta == 0.0) return z.coeffs().norm();
  const Eigen::ArrayXd scale = z.basis()->eigenvalues().array().pow(beta);
  return (scale * z.coeffs().array()).matrix().norm();
}

double inner_product(const StateVector& x, const StateVector& y) {
  assert_conforms(x);
  assert_conforms(y);
  require(x.basis()->same_as(*y.basis()), "inner product across different bases");
  return x.coeffs().dot(y.coeffs());
}

DecayReport decay_bound_check(const SpectralBasis& basis, std::span<const double> times,
                              std::span<const StateVector> states) {
  require(times.size() == states.size(), "decay audit needs one time per state");
  const DecayEstimate estimate = basis.decay_estimate();
  DecayReport report;
  for (std::size_t s = 0; s < times.size(); ++s) {
    const auto& z = states[s];
    require(z.basis() && z.basis()->same_as(basis), "decay sample from a different basis");
    const double norm = z.norm();
    if (norm == 0.0) continue;
    const double bound = estimate.constant * std::exp(-estimate.rate * times[s]);
    const double ratio = semigroup_apply(times[s], z).norm() / (bound * norm);
    report.max_ratio = std::max(report.max_ratio, ratio);
    // one ulp-scale allowance: the lowest mode saturates the bound exactly
    if (ratio > 1.0 + 4.0 * std::numeric_limits<double>::epsilon()) {
      report.holds = false;
      report.violations.push_back({times[s], z});
    }
  }
  return report;
}

}  // namespace apxctl
