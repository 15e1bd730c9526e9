#pragma once

// Diagonal sectorial operator A described by its spectrum. Every mode is an
// abstract orthonormal label phi_{j,k}; the semigroup generated by -A acts as
// exp(-lambda_j t) on each coefficient.

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace apxctl {

struct Mode {
  int eigen_index = 0;         // j, 1-based
  int multiplicity_index = 0;  // k, 1-based within the eigenspace
  double eigenvalue = 0.0;
  std::vector<int> wave_numbers;  // spatial labels for presets (sin(p x) ...)
};

struct DecayEstimate {
  double constant = 1.0;  // K
  double rate = 0.0;      // mu
};

/// Axis-aligned subdomain of [0, pi]^d used for restriction-type control
/// operators; only the first `dimension` intervals are used.
struct Box {
  double lo[2] = {0.0, 0.0};
  double hi[2] = {0.0, 0.0};
};

class SpectralBasis {
 public:
  /// lambda_j = j^2, gamma_j = 1, modes sqrt(2/pi) sin(j x) on [0, pi].
  static std::shared_ptr<const SpectralBasis> heat_1d(std::size_t modes);

  /// lambda = p^2 + q^2 on [0, pi]^2, modes (2/pi) sin(p x) sin(q y). Only
  /// complete eigenspaces are kept: the truncation is the largest union of
  /// whole eigenspaces with at most `max_modes` members.
  static std::shared_ptr<const SpectralBasis> heat_2d(std::size_t max_modes);

  /// Abstract spectrum without spatial evaluators.
  static std::shared_ptr<const SpectralBasis> from_spectrum(std::vector<double> eigenvalues,
                                                           std::vector<int> multiplicities);

  static std::shared_ptr<const SpectralBasis> from_preset(const std::string& name,
                                                         std::size_t modes);

  std::size_t size() const noexcept { return modes_.size(); }
  std::size_t distinct_count() const noexcept { return distinct_.size(); }
  const std::vector<Mode>& modes() const noexcept { return modes_; }
  const std::vector<double>& distinct_eigenvalues() const noexcept { return distinct_; }
  const std::vector<int>& multiplicities() const noexcept { return multiplicity_; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return lambda_; }
  const std::string& preset() const noexcept { return preset_; }
  int spatial_dimension() const noexcept { return dimension_; }

  DecayEstimate decay_estimate() const { return {1.0, distinct_.front()}; }

  /// exp(-lambda_i t) per mode.
  Eigen::VectorXd semigroup_factors(double t) const;

  bool same_as(const SpectralBasis& other) const;

  /// <chi_box phi_i, phi_j> in closed form; presets only.
  double restricted_inner_product(std::size_t i, std::size_t j, const Box& box) const;

 private:
  SpectralBasis(std::string preset, int dimension, std::vector<Mode> modes);

  std::string preset_;
  int dimension_ = 0;
  std::vector<Mode> modes_;
  std::vector<double> distinct_;
  std::vector<int> multiplicity_;
  Eigen::VectorXd lambda_;
};

using BasisPtr = std::shared_ptr<const SpectralBasis>;

/// Coefficients of z in the eigenbasis.
class StateVector {
 public:
  StateVector() = default;
  StateVector(BasisPtr basis, Eigen::VectorXd coeffs);
  static StateVector zeros(BasisPtr basis);

  const BasisPtr& basis() const noexcept { return basis_; }
  const Eigen::VectorXd& coeffs() const noexcept { return coeffs_; }
  Eigen::VectorXd& coeffs() noexcept { return coeffs_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(coeffs_.size()); }

  /// Z-norm; modes are orthonormal so this is the Euclidean norm.
  double norm() const { return coeffs_.norm(); }

 private:
  BasisPtr basis_;
  Eigen::VectorXd coeffs_;
};

StateVector semigroup_apply(double t, const StateVector& z);
StateVector fractional_power_apply(double beta, const StateVector& z);
double beta_norm(double beta, const StateVector& z);
double inner_product(const StateVector& x, const StateVector& y);

struct DecaySample {
  double time = 0.0;
  StateVector state;
};

struct DecayReport {
  bool holds = true;
  double max_ratio = 0.0;
  std::vector<DecaySample> violations;
};

/// Audits ||T(t) z|| <= K exp(-mu t) ||z|| over the given samples.
DecayReport decay_bound_check(const SpectralBasis& basis, std::span<const double> times,
                              std::span<const StateVector> states);

}  // namespace apxctl
