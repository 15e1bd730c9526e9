#pragma once

// Terminal-window controllability machinery for the linear system
// z' = -A z + B u on [tau - delta, tau]:
//   G u    = int_{tau-delta}^{tau} T(tau - s) B u(s) ds
//   G* z   = B* T(tau - .) z
//   Q      = G G*
// together with the eigenspace rank test and the Tikhonov-regularized steering
// control u_alpha = G* (alpha I + Q)^{-1} w.

#include "apxctl/control_operator.hpp"
#include "apxctl/dynamics.hpp"
#include "apxctl/spectral.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace apxctl {

struct TimeWindow {
  double horizon = 1.0;  // tau
  double length = 0.5;   // delta

  double start() const noexcept { return horizon - length; }
  /// 0 < delta < tau.
  void validate() const;
};

/// Samples of a control on an increasing time grid; linear in between.
struct ControlSignal {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> values;

  std::size_t size() const noexcept { return times.size(); }
  Eigen::VectorXd at(double t) const;
  ControlFn as_function() const;
  /// Trapezoid L2(window; U) inner product; both signals share the grid.
  double inner_product(const ControlSignal& other) const;
  ControlSignal operator+(const ControlSignal& other) const;
  ControlSignal operator-(const ControlSignal& other) const;
};

std::vector<double> uniform_window_grid(const TimeWindow& window, std::size_t panels);

struct ControlContext {
  BasisPtr basis;
  ControlOperator control;
  TimeWindow window;
};

/// G u by exponential-trapezoid panels on the signal grid, the same scheme
/// the integrator uses.
StateVector control_map_apply(const ControlContext& ctx, const ControlSignal& u);

/// t -> B* T(tau - t) z on the given grid.
ControlSignal control_map_adjoint(const ControlContext& ctx, const StateVector& z,
                                  std::span<const double> times);

class GramianMatrix {
 public:
  enum class Assembly { analytic, quadrature };

  GramianMatrix(Eigen::MatrixXd entries, TimeWindow window, Assembly assembly);

  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  const TimeWindow& window() const noexcept { return window_; }
  Assembly assembly() const noexcept { return assembly_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(entries_.rows()); }

  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }  // ascending
  const Eigen::MatrixXd& eigenvectors() const noexcept { return eigenvectors_; }
  double min_eigenvalue() const { return eigenvalues_[0]; }
  double max_eigenvalue() const { return eigenvalues_[eigenvalues_.size() - 1]; }
  /// Smallest eigenvalue above 1e-12 trace / m.
  bool is_positive_definite() const;
  double spd_threshold() const;
  double symmetry_defect() const;
  /// Spectral condition number of alpha I + Q.
  double regularized_condition(double alpha) const;

 private:
  Eigen::MatrixXd entries_;
  TimeWindow window_;
  Assembly assembly_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
};

/// Closed form: <B* phi_i, B* phi_j> (1 - exp(-(l_i + l_j) delta)) / (l_i + l_j).
GramianMatrix assemble_gramian(const SpectralBasis& basis, const ControlOperator& control,
                               const TimeWindow& window);

enum class QuadratureRule { trapezoid, gauss_legendre };

/// Composite quadrature of int_0^delta T(s) B B* T(s) ds with `panels` panels.
GramianMatrix assemble_gramian_quadrature(const SpectralBasis& basis, const ControlOperator& control,
                                          const TimeWindow& window, std::size_t panels,
                                          QuadratureRule rule = QuadratureRule::gauss_legendre);

struct H1Report {
  bool holds = false;
  std::size_t rank = 0;
  std::size_t modes = 0;
  double threshold = 0.0;
  Eigen::VectorXd singular_values;
};

/// Numerical rank of {B* phi_{j,k}}; singular values below 1e-10 of the
/// largest count as zero.
H1Report check_h1(const SpectralBasis& basis, const ControlOperator& control);

struct RegularizedSolve {
  Eigen::VectorXd solution;
  double residual = 0.0;  // ||(alpha I + Q) y - w||
};

/// Solves (alpha I + Q) y = w by Cholesky with one refinement sweep.
RegularizedSolve regularized_resolve(double alpha, const GramianMatrix& gramian, const Eigen::VectorXd& w);

struct RegularizedControl {
  double alpha = 0.0;
  Eigen::VectorXd residual;    // w = z1 - T(delta) y0
  Eigen::VectorXd multiplier;  // (alpha I + Q)^{-1} w
  ControlSignal signal;
};

RegularizedControl synthesize_control(double alpha, const ControlContext& ctx, const GramianMatrix& gramian,
                                      const StateVector& y0, const StateVector& target,
                                      std::span<const double> times);

/// u_alpha for an explicit residual w.
RegularizedControl regularized_control(double alpha, const ControlContext& ctx, const GramianMatrix& gramian,
                                       const Eigen::VectorXd& w, std::span<const double> times);

struct IdentityReport {
  Eigen::VectorXd image;      // G u_alpha
  Eigen::VectorXd predicted;  // w - alpha (alpha I + Q)^{-1} w
  double defect = 0.0;
};

IdentityReport steering_identity_check(double alpha, const ControlContext& ctx, const GramianMatrix& gramian,
                                       const Eigen::VectorXd& w, std::span<const double> times);

struct ReferenceControl {
  ControlSignal signal;
  Eigen::VectorXd image;            // G u_alpha
  Eigen::VectorXd predicted;        // z - alpha (alpha I + Q)^{-1} (z - G v)
  Eigen::VectorXd error_minus;      // alpha (alpha I + Q)^{-1} (z - G v)
  Eigen::VectorXd error_plus;       // alpha (alpha I + Q)^{-1} (z + G v)
};

/// u_alpha = G*(aI+Q)^{-1} z + (v - G*(aI+Q)^{-1} G v) for a reference v
/// sampled on the window grid. Both sign variants of the error are reported.
ReferenceControl control_with_reference(double alpha, const ControlContext& ctx, const GramianMatrix& gramian,
                                        const Eigen::VectorXd& z, const ControlSignal& v);

struct VanishingRow {
  double alpha = 0.0;
  double norm = 0.0;  // ||alpha (alpha I + Q)^{-1} z||
};

struct VanishingReport {
  std::vector<VanishingRow> rows;
  bool positive_definite = false;
  bool nonincreasing = false;
  double final_bound = 0.0;  // alpha_min / (alpha_min + sigma_min) ||z||
  bool within_bound = false;
  bool ok() const { return positive_definite && nonincreasing && within_bound; }
};

VanishingReport vanishing_regularization_check(const GramianMatrix& gramian, const Eigen::VectorXd& z,
                                               std::span<const double> alphas);

}  // namespace apxctl
