#include "apxctl/control_operator.hpp"

#include "apxctl/error.hpp"

namespace apxctl {

ControlOperator::ControlOperator(Eigen::MatrixXd matrix, std::string label)
    : matrix_(std::move(matrix)), label_(std::move(label)) {
  require(matrix_.rows() >= 1 && matrix_.cols() >= 1, "control operator must be non-empty");
  require(matrix_.allFinite(), "control operator has non-finite entries");
  identity_ = matrix_.rows() == matrix_.cols() && matrix_ == Eigen::MatrixXd::Identity(matrix_.rows(), matrix_.cols());
}

ControlOperator ControlOperator::identity(const SpectralBasis& basis) {
  const auto m = static_cast<Eigen::Index>(basis.size());
  return ControlOperator(Eigen::MatrixXd::Identity(m, m), "identity");
}

ControlOperator ControlOperator::restriction(const SpectralBasis& basis, const Box& box) {
  const auto m = basis.size();
  Eigen::MatrixXd matrix(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      const double v = basis.restricted_inner_product(i, j, box);
      matrix(i, j) = v;
      matrix(j, i) = v;
    }
  return ControlOperator(std::move(matrix), "restriction");
}

ControlOperator ControlOperator::with_zero_adjoint_image(std::size_t mode) const {
  require(mode < state_dim(), "mode index out of range");
  Eigen::MatrixXd zeroed = matrix_;
  zeroed.row(static_cast<Eigen::Index>(mode)).setZero();
  return ControlOperator(std::move(zeroed), label_ + "-drop" + std::to_string(mode));
}

}  // namespace apxctl
