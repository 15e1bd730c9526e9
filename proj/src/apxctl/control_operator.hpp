#pragma once

#include "apxctl/spectral.hpp"

#include <Eigen/Dense>

#include <string>

namespace apxctl {

/// Bounded B: U -> Z as an m x m_u matrix in orthonormal coordinates. Row i of
/// the matrix is the adjoint image B* phi_i.
class ControlOperator {
 public:
  ControlOperator() = default;
  explicit ControlOperator(Eigen::MatrixXd matrix, std::string label = "matrix");

  static ControlOperator identity(const SpectralBasis& basis);
  /// Multiplication by the indicator of `box`, projected onto the truncation.
  static ControlOperator restriction(const SpectralBasis& basis, const Box& box);

  /// Same operator with B* phi_mode forced to zero.
  ControlOperator with_zero_adjoint_image(std::size_t mode) const;

  std::size_t state_dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  std::size_t control_dim() const noexcept { return static_cast<std::size_t>(matrix_.cols()); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  const std::string& label() const noexcept { return label_; }
  /// Exactly the identity matrix; products with it are skipped.
  bool is_identity() const noexcept { return identity_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& u) const { return identity_ ? u : Eigen::VectorXd(matrix_ * u); }
  Eigen::VectorXd adjoint(const Eigen::VectorXd& z) const {
    return identity_ ? z : Eigen::VectorXd(matrix_.transpose() * z);
  }

 private:
  Eigen::MatrixXd matrix_;
  std::string label_;
  bool identity_ = false;
};

}  // namespace apxctl
