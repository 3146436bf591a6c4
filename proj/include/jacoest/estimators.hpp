#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "jacoest/scenario.hpp"

namespace jacoest {

enum class Method { LSE, TLS, WLS, GLS, KRON, NN };

std::string to_string(Method m);
Method parse_method(const std::string& text);

struct JacobianEstimate {
  Matrix values;
  Method method = Method::LSE;
  std::vector<IndexEntry> row_map;
  std::vector<IndexEntry> col_map;
  /// Named scalars in insertion order, e.g. "rank", "cond_AAt", "gls_iterations".
  std::vector<std::pair<std::string, double>> diagnostics;
  /// GLS: Frobenius norm of the residual after each iteration.
  std::vector<double> residual_trace;
  /// GLS: diagonal of the covariance used for the returned estimate.
  Vector omega;
  bool rank_deficient = false;

  double diagnostic(const std::string& name, double fallback = 0.0) const;
};

struct GlsSettings {
  int iterations = 100;
  /// Stop once ||Omega_k - Omega_{k-1}||_F / ||Omega_{k-1}||_F drops below this.
  /// Zero disables the early exit.
  double early_exit_tol = 1e-10;
};

struct KronSettings {
  /// Upper bound on the bytes of the NT x N^2 design matrix.
  std::size_t memory_budget_bytes = std::size_t{16} << 20;
};

/// J^T = pinv(A A^T) A B^T.
JacobianEstimate estimate_lse(const MeasurementWindow& w);

/// SVD of [A^T B^T] (T x 2N); J^T = -V12 V22^{-1}. Throws SingularV22.
JacobianEstimate estimate_tls(const MeasurementWindow& w);

/// J^T = pinv(A W A^T) A W B^T with W = diag(weights). Throws
/// std::invalid_argument for a nonpositive weight or a length other than T.
JacobianEstimate estimate_wls(const MeasurementWindow& w, const Vector& weights);

/// Feasible GLS with a diagonal T x T covariance, starting from Omega = I.
JacobianEstimate estimate_gls(const MeasurementWindow& w, const GlsSettings& settings = {});

/// Least squares on vec(B) = (A^T kron I_N) vec(J). Throws MemoryBudgetExceeded.
JacobianEstimate estimate_kron(const MeasurementWindow& w, const KronSettings& settings = {});

/// Dispatch for LSE/TLS/GLS/KRON; WLS uses unit weights here.
JacobianEstimate estimate(Method m, const MeasurementWindow& w, const GlsSettings& gls = {},
                          const KronSettings& kron = {});

/// J = Lambda_B^{-1} J_hat Lambda_A. Throws std::invalid_argument on a zero
/// entry of lambda_b or mismatched sizes.
JacobianEstimate denormalize(const JacobianEstimate& e, const Vector& lambda_a,
                             const Vector& lambda_b);

/// Bytes the KRON design matrix would need.
std::size_t kron_design_bytes(int n, int t);

}  // namespace jacoest
