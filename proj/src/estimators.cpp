#include "jacoest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include "jacoest/errors.hpp"
#include "jacoest/linalg.hpp"

namespace jacoest {

std::string to_string(Method m) {
  switch (m) {
    case Method::LSE: return "LSE";
    case Method::TLS: return "TLS";
    case Method::WLS: return "WLS";
    case Method::GLS: return "GLS";
    case Method::KRON: return "KRON";
    case Method::NN: return "NN";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::toupper(c); });
  for (Method m : {Method::LSE, Method::TLS, Method::WLS, Method::GLS, Method::KRON, Method::NN})
    if (t == to_string(m)) return m;
  throw ConfigError("unknown estimator '" + text + "'");
}

double JacobianEstimate::diagnostic(const std::string& name, double fallback) const {
  for (const auto& [k, v] : diagnostics)
    if (k == name) return v;
  return fallback;
}

namespace {

void check_window(const MeasurementWindow& w) {
  if (w.b.rows() != w.a.rows() || w.b.cols() != w.a.cols())
    throw DimensionError("window matrices A and B must have the same shape");
  if (w.t() <= w.n()) throw WindowTooShort(w.t(), w.n());
}

JacobianEstimate labelled(const MeasurementWindow& w, Method m) {
  JacobianEstimate e;
  e.method = m;
  e.row_map = w.b_map;
  e.col_map = w.a_map;
  return e;
}

// J^T = pinv(A W A^T) A W B^T with W = diag(w), evaluated as the minimum-norm
// least-squares solution of W^(1/2) A^T J^T = W^(1/2) B^T. Same answer, but the
// conditioning is that of A rather than A A^T, which matters once GLS weights
// spread over many orders of magnitude.
Matrix weighted_solve(const Matrix& a, const Matrix& b, const Vector& w, JacobianEstimate& e) {
  const Vector root = w.cwiseSqrt();
  const Matrix design = root.asDiagonal() * a.transpose();
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(design);
  cod.setThreshold(static_cast<double>(std::max(design.rows(), design.cols())) *
                   std::numeric_limits<double>::epsilon());
  const int rank = static_cast<int>(cod.rank());
  e.rank_deficient = rank < a.rows();
  e.diagnostics.emplace_back("rank", rank);
  e.diagnostics.emplace_back("cond_AAt", condition_number(a * w.asDiagonal() * a.transpose()));
  const Matrix rhs = root.asDiagonal() * b.transpose();
  return cod.solve(rhs).transpose();
}

// Weights from a covariance diagonal with pinv semantics.
Vector inverse_diagonal(const Vector& omega) {
  const double tol = static_cast<double>(omega.size()) * std::numeric_limits<double>::epsilon() *
                     omega.cwiseAbs().maxCoeff();
  Vector inv = Vector::Zero(omega.size());
  for (Eigen::Index i = 0; i < omega.size(); ++i)
    if (std::abs(omega(i)) > tol) inv(i) = 1.0 / omega(i);
  return inv;
}

}  // namespace

JacobianEstimate estimate_lse(const MeasurementWindow& w) {
  check_window(w);
  auto e = labelled(w, Method::LSE);
  e.values = weighted_solve(w.a, w.b, Vector::Ones(w.t()), e);
  return e;
}

JacobianEstimate estimate_wls(const MeasurementWindow& w, const Vector& weights) {
  check_window(w);
  if (weights.size() != w.t()) throw std::invalid_argument("WLS needs one weight per column");
  for (Eigen::Index i = 0; i < weights.size(); ++i)
    if (!(weights(i) > 0.0)) throw std::invalid_argument("WLS weights must be positive");
  auto e = labelled(w, Method::WLS);
  e.values = weighted_solve(w.a, w.b, weights, e);
  return e;
}

JacobianEstimate estimate_tls(const MeasurementWindow& w) {
  check_window(w);
  const int n = w.n();
  Matrix z(w.t(), 2 * n);
  z << w.a.transpose(), w.b.transpose();
  Eigen::JacobiSVD<Matrix> svd(z, Eigen::ComputeFullV);
  const Matrix& v = svd.matrixV();
  const Matrix v12 = v.topRightCorner(n, n);
  const Matrix v22 = v.bottomRightCorner(n, n);

  Eigen::JacobiSVD<Matrix> v22_svd(v22);
  const double v22_min = v22_svd.singularValues()(n - 1);
  if (!(v22_min > 1e-12)) throw SingularV22(v22_min);

  auto e = labelled(w, Method::TLS);
  // J^T = -V12 V22^{-1}, i.e. J = -V22^{-T} V12^T.
  e.values = -v22.transpose().partialPivLu().solve(v12.transpose());
  const Vector& s = svd.singularValues();
  e.diagnostics.emplace_back("sigma_n", s(n - 1));
  e.diagnostics.emplace_back("sigma_n_plus_1", s.size() > n ? s(n) : 0.0);
  e.diagnostics.emplace_back("sigma_min", s(s.size() - 1));
  e.diagnostics.emplace_back("v22_sigma_min", v22_min);
  return e;
}

JacobianEstimate estimate_gls(const MeasurementWindow& w, const GlsSettings& settings) {
  check_window(w);
  if (settings.iterations < 1) throw std::invalid_argument("GLS needs at least one iteration");
  const int n = w.n();
  const double b_norm = w.b.norm();
  auto e = labelled(w, Method::GLS);
  Vector omega = Vector::Ones(w.t());
  int used = 0;
  JacobianEstimate step;
  for (int it = 0; it < settings.iterations; ++it) {
    step.diagnostics.clear();
    e.values = weighted_solve(w.a, w.b, inverse_diagonal(omega), step);
    e.rank_deficient = step.rank_deficient;
    e.omega = omega;
    ++used;
    // T x N residual, one row per sample.
    const Matrix resid = (w.b - e.values * w.a).transpose();
    const double r_norm = resid.norm();
    e.residual_trace.push_back(r_norm);
    // An exact fit would drive Omega to zero and empty the weights.
    if (r_norm <= 1e-13 * b_norm) break;
    const Vector next = resid.rowwise().squaredNorm() / static_cast<double>(n);
    const double change = (next - omega).norm() / omega.norm();
    omega = next;
    if (settings.early_exit_tol > 0.0 && change < settings.early_exit_tol) break;
  }
  e.diagnostics = step.diagnostics;
  e.diagnostics.emplace_back("gls_iterations", used);
  e.diagnostics.emplace_back("final_residual", e.residual_trace.back());
  return e;
}

std::size_t kron_design_bytes(int n, int t) {
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(t) * static_cast<std::size_t>(n) *
         static_cast<std::size_t>(n) * sizeof(double);
}

JacobianEstimate estimate_kron(const MeasurementWindow& w, const KronSettings& settings) {
  check_window(w);
  const int n = w.n(), t = w.t();
  const std::size_t need = kron_design_bytes(n, t);
  if (need > settings.memory_budget_bytes)
    throw MemoryBudgetExceeded("KRON design matrix needs " + std::to_string(need) +
                               " bytes, budget is " + std::to_string(settings.memory_budget_bytes) +
                               "; use LSE for this window");
  const Matrix design = Eigen::kroneckerProduct(w.a.transpose(), Matrix::Identity(n, n));
  const Vector rhs = Eigen::Map<const Vector>(w.b.data(), w.b.size());
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(design);
  const Vector vec_j = cod.solve(rhs);
  auto e = labelled(w, Method::KRON);
  e.values = Eigen::Map<const Matrix>(vec_j.data(), n, n);
  e.rank_deficient = cod.rank() < n * n;
  e.diagnostics.emplace_back("rank", cod.rank());
  return e;
}

JacobianEstimate estimate(Method m, const MeasurementWindow& w, const GlsSettings& gls,
                          const KronSettings& kron) {
  switch (m) {
    case Method::LSE: return estimate_lse(w);
    case Method::TLS: return estimate_tls(w);
    case Method::WLS: return estimate_wls(w, Vector::Ones(w.t()));
    case Method::GLS: return estimate_gls(w, gls);
    case Method::KRON: return estimate_kron(w, kron);
    case Method::NN: break;
  }
  throw std::invalid_argument("estimator " + to_string(m) + " does not run on a window");
}

JacobianEstimate denormalize(const JacobianEstimate& e, const Vector& lambda_a,
                             const Vector& lambda_b) {
  if (lambda_a.size() != e.values.cols() || lambda_b.size() != e.values.rows())
    throw std::invalid_argument("scaling sizes do not match the estimate");
  for (Eigen::Index i = 0; i < lambda_b.size(); ++i)
    if (lambda_b(i) == 0.0) throw std::invalid_argument("Lambda_B has a zero diagonal entry");
  JacobianEstimate out = e;
  out.values = lambda_b.cwiseInverse().asDiagonal() * e.values * lambda_a.asDiagonal();
  return out;
}

}  // namespace jacoest
