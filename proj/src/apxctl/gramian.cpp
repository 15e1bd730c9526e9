#include "apxctl/gramian.hpp"

#include "apxctl/error.hpp"
#include "apxctl/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace apxctl {

void TimeWindow::validate() const {
  if (!(length > 0.0) || !(length < horizon) || !std::isfinite(horizon))
    fail(ErrorKind::invalid_argument, "control window needs 0 < delta < tau");
}

Eigen::VectorXd ControlSignal::at(double t) const {
  require(!times.empty(), "empty control signal");
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  const auto upper = std::upper_bound(times.begin(), times.end(), t);
  const auto hi = static_cast<std::size_t>(upper - times.begin());
  const std::size_t lo = hi - 1;
  if (t == times[lo]) return values[lo];
  const double theta = (t - times[lo]) / (times[hi] - times[lo]);
  return (1.0 - theta) * values[lo] + theta * values[hi];
}

ControlFn ControlSignal::as_function() const {
  return [copy = *this](double t) { return copy.at(t); };
}

double ControlSignal::inner_product(const ControlSignal& other) const {
  require(times == other.times, "control signals live on different grids");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    sum += 0.5 * (times[i + 1] - times[i]) * (values[i].dot(other.values[i]) + values[i + 1].dot(other.values[i + 1]));
  return sum;
}

ControlSignal ControlSignal::operator+(const ControlSignal& other) const {
  require(times == other.times, "control signals live on different grids");
  ControlSignal out = *this;
  for (std::size_t i = 0; i < values.size(); ++i) out.values[i] += other.values[i];
  return out;
}

ControlSignal ControlSignal::operator-(const ControlSignal& other) const {
  require(times == other.times, "control signals live on different grids");
  ControlSignal out = *this;
  for (std::size_t i = 0; i < values.size(); ++i) out.values[i] -= other.values[i];
  return out;
}

std::vector<double> uniform_window_grid(const TimeWindow& window, std::size_t panels) {
  window.validate();
  require(panels >= 1, "window grid needs at least one panel");
  std::vector<double> grid(panels + 1);
  const double h = window.length / static_cast<double>(panels);
  for (std::size_t i = 0; i < panels; ++i) grid[i] = window.start() + static_cast<double>(i) * h;
  grid[panels] = window.horizon;
  return grid;
}

namespace {

void check_context(const ControlContext& ctx) {
  require(ctx.basis != nullptr, "control context needs a basis");
  require(ctx.control.state_dim() == ctx.basis->size(), "control operator does not match the basis");
  ctx.window.validate();
}

void check_window_grid(const TimeWindow& window, std::span<const double> times) {
  if (times.size() < 2) fail(ErrorKind::invalid_argument, "empty control window grid");
  require(std::abs(times.front() - window.start()) <= time_tolerance(window.start()) &&
              std::abs(times.back() - window.horizon) <= time_tolerance(window.horizon),
          "control grid must span [tau - delta, tau]");
  for (std::size_t i = 1; i < times.size(); ++i) require(times[i] > times[i - 1], "control grid must increase");
}

}  // namespace

StateVector control_map_apply(const ControlContext& ctx, const ControlSignal& u) {
  check_context(ctx);
  check_window_grid(ctx.window, u.times);
  require(u.values.size() == u.times.size(), "control signal needs one sample per node");
  const Eigen::ArrayXd lambda = ctx.basis->eigenvalues().array();
  const auto m = lambda.size();
  const Eigen::MatrixXd& B = ctx.control.matrix();

  const auto n_nodes = static_cast<Eigen::Index>(u.times.size());
  const auto k = static_cast<Eigen::Index>(ctx.control.control_dim());
  constexpr Eigen::Index block = 2048;
  Eigen::MatrixXd raw(k, block + 1), pushed;

  Eigen::ArrayXd state = Eigen::ArrayXd::Zero(m);
  PanelWeights weights(lambda);
  // blocks of panels [first, first + count) share their boundary node
  for (Eigen::Index first = 0; first + 1 < n_nodes; first += block) {
    const Eigen::Index count = std::min(block, n_nodes - 1 - first);
    for (Eigen::Index n = 0; n <= count; ++n) raw.col(n) = u.values[static_cast<std::size_t>(first + n)];
    if (ctx.control.is_identity())
      pushed = raw.leftCols(count + 1);
    else
      pushed.noalias() = B * raw.leftCols(count + 1);
    for (Eigen::Index n = 0; n < count; ++n) {
      const auto node = static_cast<std::size_t>(first + n);
      const double h = u.times[node + 1] - u.times[node];
      const PanelWeights::Set& w = weights(h);
      state = w.decay * state + w.left * pushed.col(n).array() + w.right * pushed.col(n + 1).array();
    }
  }
  return StateVector(ctx.basis, state.matrix());
}

ControlSignal control_map_adjoint(const ControlContext& ctx, const StateVector& z, std::span<const double> times) {
  check_context(ctx);
  check_window_grid(ctx.window, times);
  require(z.size() == ctx.basis->size(), "state does not conform to the basis");
  ControlSignal out;
  out.times.assign(times.begin(), times.end());
  out.values.reserve(times.size());
  const auto m = static_cast<Eigen::Index>(z.size());
  const auto n_nodes = static_cast<Eigen::Index>(times.size());
  const Eigen::ArrayXd lambda = ctx.basis->eigenvalues().array();
  constexpr Eigen::Index block = 2048;
  Eigen::MatrixXd decayed(m, block), image;
  for (Eigen::Index first = 0; first < n_nodes; first += block) {
    const Eigen::Index count = std::min(block, n_nodes - first);
    for (Eigen::Index n = 0; n < count; ++n) {
      const double t = times[static_cast<std::size_t>(first + n)];
      decayed.col(n) = ((-lambda * (ctx.window.horizon - t)).exp() * z.coeffs().array()).matrix();
    }
    if (ctx.control.is_identity()) {
      for (Eigen::Index n = 0; n < count; ++n) out.values.emplace_back(decayed.col(n));
      continue;
    }
    image.noalias() = ctx.control.matrix().transpose() * decayed.leftCols(count);
    for (Eigen::Index n = 0; n < count; ++n) out.values.emplace_back(image.col(n));
  }
  return out;
}

GramianMatrix::GramianMatrix(Eigen::MatrixXd entries, TimeWindow window, Assembly assembly)
    : entries_(std::move(entries)), window_(window), assembly_(assembly) {
  require(entries_.rows() == entries_.cols() && entries_.rows() >= 1, "Gramian must be square");
  require(entries_.allFinite(), "Gramian has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(entries_);
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

double GramianMatrix::spd_threshold() const {
  return 1e-12 * entries_.trace() / static_cast<double>(entries_.rows());
}

bool GramianMatrix::is_positive_definite() const {
  return entries_.trace() > 0.0 && min_eigenvalue() > spd_threshold();
}

double GramianMatrix::symmetry_defect() const { return (entries_ - entries_.transpose()).cwiseAbs().maxCoeff(); }

double GramianMatrix::regularized_condition(double alpha) const {
  return (alpha + std::max(max_eigenvalue(), 0.0)) / (alpha + std::max(min_eigenvalue(), 0.0));
}

GramianMatrix assemble_gramian(const SpectralBasis& basis, const ControlOperator& control,
                               const TimeWindow& window) {
  window.validate();
  require(control.state_dim() == basis.size(), "control operator does not match the basis");
  const Eigen::MatrixXd& B = control.matrix();
  const Eigen::MatrixXd kernel = B * B.transpose();
  const Eigen::VectorXd& lambda = basis.eigenvalues();
  const auto m = lambda.size();
  Eigen::MatrixXd q(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const double s = lambda[i] + lambda[j];
      q(i, j) = kernel(i, j) * (-std::expm1(-s * window.length) / s);
    }
  q = 0.5 * (q + q.transpose()).eval();
  return GramianMatrix(std::move(q), window, GramianMatrix::Assembly::analytic);
}

GramianMatrix assemble_gramian_quadrature(const SpectralBasis& basis, const ControlOperator& control,
                                          const TimeWindow& window, std::size_t panels, QuadratureRule rule) {
  window.validate();
  require(panels >= 1, "quadrature needs at least one panel");
  require(control.state_dim() == basis.size(), "control operator does not match the basis");
  const Eigen::MatrixXd& B = control.matrix();
  const auto m = static_cast<Eigen::Index>(basis.size());
  const double h = window.length / static_cast<double>(panels);

  // W_ij = sum_k w_k exp(-(l_i + l_j) s_k); Q = (B B*) .* W
  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(m, m);
  auto accumulate = [&](double s, double w) {
    const Eigen::VectorXd d = basis.semigroup_factors(s);
    weights.noalias() += w * d * d.transpose();
  };
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = static_cast<double>(p) * h;
    if (rule == QuadratureRule::trapezoid) {
      accumulate(a, 0.5 * h);
      accumulate(p + 1 == panels ? window.length : a + h, 0.5 * h);
    } else {
      for (std::size_t g = 0; g < GaussLegendre5::nodes.size(); ++g)
        accumulate(a + 0.5 * h * (1.0 + GaussLegendre5::nodes[g]), 0.5 * h * GaussLegendre5::weights[g]);
    }
  }
  Eigen::MatrixXd q = (B * B.transpose()).cwiseProduct(weights);
  q = 0.5 * (q + q.transpose()).eval();
  return GramianMatrix(std::move(q), window, GramianMatrix::Assembly::quadrature);
}

H1Report check_h1(const SpectralBasis& basis, const ControlOperator& control) {
  require(control.state_dim() == basis.size(), "control operator does not match the basis");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(control.matrix());
  H1Report report;
  report.modes = basis.size();
  report.singular_values = svd.singularValues();
  const double largest = report.singular_values.size() ? report.singular_values[0] : 0.0;
  report.threshold = 1e-10 * largest;
  for (Eigen::Index i = 0; i < report.singular_values.size(); ++i)
    if (largest > 0.0 && report.singular_values[i] > report.threshold) ++report.rank;
  report.holds = report.rank == report.modes;
  return report;
}

RegularizedSolve regularized_resolve(double alpha, const GramianMatrix& gramian, const Eigen::VectorXd& w) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorKind::invalid_argument, "regularization alpha must be positive");
  require(static_cast<std::size_t>(w.size()) == gramian.size(), "right-hand side does not match the Gramian");
  if (!w.allFinite()) fail(ErrorKind::numerical, "regularized solve: non-finite right-hand side");
  const auto n = static_cast<Eigen::Index>(gramian.size());
  const Eigen::MatrixXd system = gramian.entries() + alpha * Eigen::MatrixXd::Identity(n, n);
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() != Eigen::Success) fail(ErrorKind::numerical, "alpha I + Q is not positive definite");
  RegularizedSolve out;
  out.solution = llt.solve(w);
  out.solution += llt.solve(w - system * out.solution);
  out.residual = (system * out.solution - w).norm();
  if (!out.solution.allFinite()) fail(ErrorKind::numerical, "regularized solve produced non-finite values");
  return out;
}

RegularizedControl regularized_control(double alpha, const ControlContext& ctx, const GramianMatrix& gramian,
                                       const Eigen::VectorXd& w, std::span<const double> times) {
  if (!(alpha > 0.0)) fail(ErrorKind::invalid_argument, "regularization alpha must be positive");
  RegularizedControl out;
  out.alpha = alpha;
  out.residual = w;
  out.multiplier = regularized_resolve(alpha, gramian, w).solution;
  out.signal = control_map_adjoint(ctx, StateVector(ctx.basis, out.multiplier), times);
  return out;
}

RegularizedControl synthesize_control(double alpha, const ControlContext& ctx, const GramianMatrix& gramian,
                                      const StateVector& y0, const StateVector& target,
                                      std::span<const double> times) {
  check_context(ctx);
  const StateVector free = semigroup_apply(ctx.window.length, y0);
  return regularized_control(alpha, ctx, gramian, target.coeffs() - free.coeffs(), times);
}

IdentityReport steering_identity_check(double alpha, const ControlContext& ctx, const GramianMatrix& gramian,
                                       const Eigen::VectorXd& w, std::span<const double> times) {
  const RegularizedControl control = regularized_control(alpha, ctx, gramian, w, times);
  IdentityReport report;
  report.image = control_map_apply(ctx, control.signal).coeffs();
  report.predicted = w - alpha * control.multiplier;
  report.defect = (report.image - report.predicted).norm();
  return report;
}

ReferenceControl control_with_reference(double alpha, const ControlContext& ctx, const GramianMatrix& gramian,
                                        const Eigen::VectorXd& z, const ControlSignal& v) {
  const Eigen::VectorXd gv = control_map_apply(ctx, v).coeffs();
  const RegularizedControl toward_z = regularized_control(alpha, ctx, gramian, z, v.times);
  const RegularizedControl toward_gv = regularized_control(alpha, ctx, gramian, gv, v.times);
  ReferenceControl out;
  out.signal = toward_z.signal + (v - toward_gv.signal);
  out.image = control_map_apply(ctx, out.signal).coeffs();
  out.error_minus = alpha * regularized_resolve(alpha, gramian, z - gv).solution;
  out.error_plus = alpha * regularized_resolve(alpha, gramian, z + gv).solution;
  out.predicted = z - out.error_minus;
  return out;
}

VanishingReport vanishing_regularization_check(const GramianMatrix& gramian, const Eigen::VectorXd& z,
                                               std::span<const double> alphas) {
  require(!alphas.empty(), "alpha ladder must not be empty");
  VanishingReport report;
  report.positive_definite = gramian.is_positive_definite();
  report.nonincreasing = true;
  double alpha_min = alphas.front();
  for (double alpha : alphas) {
    const double norm = (alpha * regularized_resolve(alpha, gramian, z).solution).norm();
    if (!report.rows.empty() && alpha < report.rows.back().alpha &&
        norm > report.rows.back().norm * (1.0 + 1e-12) + 1e-300)
      report.nonincreasing = false;
    report.rows.push_back({alpha, norm});
    alpha_min = std::min(alpha_min, alpha);
  }
  const double sigma_min = std::max(gramian.min_eigenvalue(), 0.0);
  report.final_bound = alpha_min / (alpha_min + sigma_min) * z.norm();
  double final_norm = report.rows.back().norm;
  for (const auto& row : report.rows)
    if (row.alpha == alpha_min) final_norm = row.norm;
  report.within_bound = final_norm <= report.final_bound * (1.0 + 1e-12);
  return report;
}

}  // namespace apxctl
