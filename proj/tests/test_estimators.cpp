#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "jacoest/errors.hpp"
#include "jacoest/estimators.hpp"
#include "jacoest/linalg.hpp"
#include "oracles.hpp"

using namespace jacoest;

namespace {

std::vector<IndexEntry> theta_map(int n) {
  std::vector<IndexEntry> m;
  for (int i = 0; i < n; ++i) m.push_back({Quantity::Theta, i + 2});
  return m;
}

std::vector<IndexEntry> p_map(int n) {
  std::vector<IndexEntry> m;
  for (int i = 0; i < n; ++i) m.push_back({Quantity::P, i + 2});
  return m;
}

MeasurementWindow make_window(const Matrix& a, const Matrix& b) {
  MeasurementWindow w;
  w.a = a;
  w.b = b;
  w.a_map = theta_map(static_cast<int>(a.rows()));
  w.b_map = p_map(static_cast<int>(b.rows()));
  return w;
}

/// B = J A + noise_scale * R.
MeasurementWindow synthetic(Rng& rng, const Matrix& j, int t, double noise_scale) {
  const Matrix a = oracle::random_matrix(rng, j.cols(), t);
  Matrix b = j * a;
  if (noise_scale > 0.0) b += noise_scale * oracle::random_matrix(rng, j.rows(), t);
  return make_window(a, b);
}

double rel(const Matrix& x, const Matrix& ref) { return (x - ref).norm() / ref.norm(); }

}  // namespace

TEST_CASE("hand-sized LSE matches explicit normal equations") {
  Matrix a(2, 3), b(2, 3);
  a << 1, 0, 2,
       0, 1, 1;
  b << 3, -1, 4,
       1, 2, 5;
  // J = B A^T (A A^T)^{-1}; A A^T = [[5, 2], [2, 2]], inverse = [[2, -2], [-2, 5]] / 6.
  Matrix bat(2, 2);
  bat << 3 * 1 + 4 * 2, -1 + 4,
         1 + 5 * 2, 2 + 5;
  Matrix inv(2, 2);
  inv << 2, -2, -2, 5;
  inv /= 6.0;
  const Matrix expect = bat * inv;
  const auto e = estimate_lse(make_window(a, b));
  CHECK((e.values - expect).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(e.diagnostic("rank") == 2.0);
  CHECK(e.diagnostic("cond_AAt") > 1.0);
}

TEST_CASE("noiseless windows are recovered exactly by every estimator") {
  Rng rng(1);
  for (int n : {2, 4, 14}) {
    const Matrix j = oracle::random_matrix(rng, n, n);
    const auto w = synthetic(rng, j, 5 * n, 0.0);
    CHECK(rel(estimate_lse(w).values, j) < 1e-9);
    CHECK(rel(estimate_tls(w).values, j) < 1e-9);
    CHECK(rel(estimate_gls(w).values, j) < 1e-9);
    CHECK(rel(estimate_kron(w).values, j) < 1e-9);
    CHECK(rel(estimate_wls(w, Vector::Ones(5 * n)).values, j) < 1e-9);
  }
}

TEST_CASE("estimate carries the window maps") {
  Rng rng(2);
  const auto w = synthetic(rng, Matrix::Identity(3, 3), 12, 0.01);
  for (auto m : {Method::LSE, Method::TLS, Method::WLS, Method::GLS, Method::KRON}) {
    const auto e = estimate(m, w);
    CHECK(e.method == m);
    CHECK(e.row_map == w.b_map);
    CHECK(e.col_map == w.a_map);
    CHECK(e.values.rows() == 3);
  }
  CHECK_THROWS_AS(estimate(Method::NN, w), std::invalid_argument);
}

TEST_CASE("WLS with unit weights is LSE and weights are scale-free") {
  Rng rng(3);
  const Matrix j = oracle::random_matrix(rng, 5, 5);
  const auto w = synthetic(rng, j, 40, 0.05);
  const Matrix lse = estimate_lse(w).values;
  CHECK(estimate_wls(w, Vector::Ones(40)).values == lse);
  Vector weights(40);
  for (int k = 0; k < 40; ++k) weights(k) = rng.uniform(0.1, 3.0);
  const Matrix one = estimate_wls(w, weights).values;
  const Matrix two = estimate_wls(w, 2.0 * weights).values;
  CHECK(rel(two, one) < 1e-12);
  CHECK(rel(one, lse) > 1e-6);
  CHECK_THROWS_AS(estimate_wls(w, Vector::Ones(39)), std::invalid_argument);
  Vector bad = Vector::Ones(40);
  bad(7) = 0.0;
  CHECK_THROWS_AS(estimate_wls(w, bad), std::invalid_argument);
}

TEST_CASE("down-weighting corrupted columns approaches LSE on the clean columns") {
  Rng rng(4);
  const Matrix j = oracle::random_matrix(rng, 4, 4);
  auto w = synthetic(rng, j, 60, 0.01);
  Vector weights = Vector::Ones(60);
  std::vector<int> keep;
  for (int k = 0; k < 60; ++k) {
    if (k % 10 == 3) {
      w.b.col(k) += 5.0 * oracle::random_matrix(rng, 4, 1);
      weights(k) = 1e-10;
    } else {
      keep.push_back(k);
    }
  }
  const auto clean = make_window(w.a(Eigen::all, keep), w.b(Eigen::all, keep));
  const Matrix ref = estimate_lse(clean).values;
  CHECK(rel(estimate_wls(w, weights).values, ref) < 1e-6);
  CHECK(rel(estimate_lse(w).values, ref) > 1e-2);
}

TEST_CASE("GLS with one iteration is LSE") {
  Rng rng(5);
  const auto w = synthetic(rng, oracle::random_matrix(rng, 6, 6), 50, 0.1);
  GlsSettings one;
  one.iterations = 1;
  const auto g = estimate_gls(w, one);
  CHECK(rel(g.values, estimate_lse(w).values) < 1e-12);
  CHECK(g.diagnostic("gls_iterations") == 1.0);
  CHECK((g.omega.array() == 1.0).all());
  GlsSettings none;
  none.iterations = 0;
  CHECK_THROWS_AS(estimate_gls(w, none), std::invalid_argument);
}

TEST_CASE("GLS early exit agrees with the fixed iteration count") {
  Rng rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    auto w = synthetic(rng, oracle::random_matrix(rng, 4, 4), 60, 0.02);
    for (int k = 20; k < 30; ++k) w.b.col(k) += 0.5 * oracle::random_matrix(rng, 4, 1);
    GlsSettings fixed;
    fixed.early_exit_tol = 0.0;
    const auto a = estimate_gls(w);
    const auto b = estimate_gls(w, fixed);
    CHECK(rel(a.values, b.values) < 1e-8);
    CHECK(a.diagnostic("gls_iterations") <= 100.0);
    CHECK(a.residual_trace.size() == static_cast<std::size_t>(a.diagnostic("gls_iterations")));
  }
}

TEST_CASE("GLS down-weights heteroscedastic columns") {
  Rng rng(7);
  int wins = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix j = oracle::random_matrix(rng, 4, 4);
    auto w = synthetic(rng, j, 80, 0.001);
    for (int k = 30; k < 45; ++k) w.b.col(k) += 0.3 * oracle::random_matrix(rng, 4, 1);
    if (rel(estimate_gls(w).values, j) < rel(estimate_lse(w).values, j)) ++wins;
  }
  CHECK(wins >= 9);
}

TEST_CASE("KRON matches LSE and respects its memory budget") {
  Rng rng(8);
  const auto w = synthetic(rng, oracle::random_matrix(rng, 5, 5), 30, 0.1);
  CHECK(rel(estimate_kron(w).values, estimate_lse(w).values) < 1e-10);

  CHECK(kron_design_bytes(14, 2399) > (std::size_t{16} << 20));
  CHECK(kron_design_bytes(14, 239) < (std::size_t{16} << 20));
  const auto big = make_window(Matrix::Zero(14, 2399), Matrix::Zero(14, 2399));
  CHECK_THROWS_AS(estimate_kron(big), MemoryBudgetExceeded);
  const auto medium = synthetic(rng, oracle::random_matrix(rng, 14, 14), 239, 0.01);
  CHECK(rel(estimate_kron(medium).values, estimate_lse(medium).values) < 1e-8);
  KronSettings tight;
  tight.memory_budget_bytes = 1024;
  CHECK_THROWS_AS(estimate_kron(w, tight), MemoryBudgetExceeded);
}

TEST_CASE("TLS matches an eigenvector oracle regardless of basis signs") {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 4;
    const auto w = synthetic(rng, oracle::random_matrix(rng, n, n), 8 * n, 0.05);
    Matrix z(w.t(), 2 * n);
    z << w.a.transpose(), w.b.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(z.transpose() * z);
    // Eigenvalues ascend, so the first n eigenvectors span the noise subspace.
    Matrix basis = eig.eigenvectors().leftCols(n);
    for (int c = 0; c < n; ++c)
      if (rng.uniform() < 0.5) basis.col(c) *= -1.0;
    const Matrix v12 = basis.topRows(n), v22 = basis.bottomRows(n);
    const Matrix jt = -v12 * v22.inverse();
    CHECK(rel(estimate_tls(w).values, jt.transpose()) < 1e-8);
  }
}

TEST_CASE("TLS reports a singular V22") {
  Rng rng(10);
  Matrix a = oracle::random_matrix(rng, 3, 20);
  a.row(1).setZero();
  const Matrix b = oracle::random_matrix(rng, 3, 20);
  CHECK_THROWS_AS(estimate_tls(make_window(a, b)), SingularV22);
}

TEST_CASE("rank-deficient windows fall back to the pseudo-inverse") {
  Rng rng(11);
  Matrix a = oracle::random_matrix(rng, 4, 30);
  a.row(2).setZero();
  const Matrix j = oracle::random_matrix(rng, 4, 4);
  const auto e = estimate_lse(make_window(a, j * a));
  CHECK(e.rank_deficient);
  CHECK(e.diagnostic("rank") == 3.0);
  // Minimum-norm solution: the unidentifiable column comes out zero.
  CHECK(e.values.col(2).norm() < 1e-12);
  Matrix expect = j;
  expect.col(2).setZero();
  CHECK(rel(e.values, expect) < 1e-10);
  CHECK(rel(estimate_kron(make_window(a, j * a)).values, expect) < 1e-10);
}

TEST_CASE("too-short and ragged windows are rejected") {
  Rng rng(12);
  const auto w = synthetic(rng, Matrix::Identity(4, 4), 4, 0.0);
  CHECK_THROWS_AS(estimate_lse(w), WindowTooShort);
  CHECK_THROWS_AS(estimate_tls(w), WindowTooShort);
  CHECK_THROWS_AS(estimate_gls(w), WindowTooShort);
  CHECK_THROWS_AS(estimate_lse(make_window(Matrix::Zero(3, 9), Matrix::Zero(3, 8))),
                  DimensionError);
}

TEST_CASE("denormalize inverts row scaling for LSE") {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const auto w = synthetic(rng, oracle::random_matrix(rng, 5, 5), 40, 0.05);
    Vector la(5), lb(5);
    for (int i = 0; i < 5; ++i) {
      la(i) = std::exp(rng.uniform(-3.0, 3.0));
      lb(i) = std::exp(rng.uniform(-3.0, 3.0));
    }
    const auto scaled = scale_window(w, la, lb);
    const auto back = denormalize(estimate_lse(scaled), la, lb);
    CHECK(rel(back.values, estimate_lse(w).values) < 1e-10);
  }
  const auto w = synthetic(rng, Matrix::Identity(3, 3), 10, 0.0);
  const auto e = estimate_lse(w);
  CHECK(denormalize(e, Vector::Ones(3), Vector::Ones(3)).values == e.values);
  Vector zero = Vector::Ones(3);
  zero(1) = 0.0;
  CHECK_THROWS_AS(denormalize(e, Vector::Ones(3), zero), std::invalid_argument);
  CHECK_THROWS_AS(denormalize(e, Vector::Ones(2), Vector::Ones(3)), std::invalid_argument);
}

TEST_CASE("property: row permutations permute every estimate") {
  Rng rng(14);
  const int n = 5;
  auto w = synthetic(rng, oracle::random_matrix(rng, n, n), 60, 0.05);
  for (int k = 10; k < 20; ++k) w.b.col(k) += 0.2 * oracle::random_matrix(rng, n, 1);
  std::vector<int> pa(n), pb(n);
  std::iota(pa.begin(), pa.end(), 0);
  std::iota(pb.begin(), pb.end(), 0);
  std::rotate(pa.begin(), pa.begin() + 2, pa.end());
  std::reverse(pb.begin(), pb.end());
  MeasurementWindow p = w;
  for (int i = 0; i < n; ++i) {
    p.a.row(i) = w.a.row(pa[i]);
    p.a_map[i] = w.a_map[pa[i]];
    p.b.row(i) = w.b.row(pb[i]);
    p.b_map[i] = w.b_map[pb[i]];
  }
  for (auto m : {Method::LSE, Method::TLS, Method::WLS, Method::GLS, Method::KRON}) {
    const Matrix base = estimate(m, w).values;
    const auto e = estimate(m, p);
    Matrix expect(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) expect(r, c) = base(pb[r], pa[c]);
    INFO(to_string(m));
    CHECK(rel(e.values, expect) < 1e-9);
    CHECK(e.row_map == p.b_map);
  }
}

TEST_CASE("property: LSE residuals are orthogonal to the rows of A") {
  Rng rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 5;
    const auto w = synthetic(rng, oracle::random_matrix(rng, n, n), 3 * n + trial, 0.3);
    const Matrix j = estimate_lse(w).values;
    const Matrix e = w.b - j * w.a;
    CHECK((w.a * e.transpose()).norm() / (w.a.norm() * e.norm()) < 1e-10);
  }
}

TEST_CASE("property: GLS is stationary under its final covariance") {
  Rng rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 4;
    const int t = 10 * n;
    auto w = synthetic(rng, oracle::random_matrix(rng, n, n), t, 0.05);
    for (int k = t / 3; k < t / 2; ++k) w.b.col(k) += 0.5 * oracle::random_matrix(rng, n, 1);
    const auto g = estimate_gls(w);
    REQUIRE(g.omega.size() == t);
    // Same pseudo-inverse rule the estimator applies to Omega.
    const double tol = t * std::numeric_limits<double>::epsilon() * g.omega.maxCoeff();
    const Vector winv = (g.omega.array() > tol).select(g.omega.cwiseInverse(), 0.0);
    const Matrix e = w.b - g.values * w.a;
    const Matrix grad = w.a * winv.asDiagonal() * e.transpose();
    // Normwise scale of the weighted normal equations A W (B - J A)^T.
    const Matrix root = winv.cwiseSqrt().asDiagonal() * w.a.transpose();
    const double scale =
        root.norm() * ((winv.cwiseSqrt().asDiagonal() * e.transpose()).norm() +
                       root.norm() * g.values.norm());
    CHECK(grad.norm() / scale < 1e-10);
  }
}

TEST_CASE("method names round-trip") {
  for (auto m : {Method::LSE, Method::TLS, Method::WLS, Method::GLS, Method::KRON, Method::NN})
    CHECK(parse_method(to_string(m)) == m);
  CHECK(parse_method("gls") == Method::GLS);
  CHECK_THROWS_AS(parse_method("ridge"), ConfigError);
}
