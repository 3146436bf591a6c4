#include "jacoest/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace jacoest {

namespace {

double pinv_tolerance(const Matrix& m, double sigma_max) {
  return static_cast<double>(std::max(m.rows(), m.cols())) *
         std::numeric_limits<double>::epsilon() * sigma_max;
}

}  // namespace

Matrix pinv(const Matrix& m) {
  if (m.size() == 0) return Matrix::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double tol = pinv_tolerance(m, s.size() ? s(0) : 0.0);
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

int numerical_rank(const Matrix& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  const double tol = pinv_tolerance(m, s(0));
  return static_cast<int>((s.array() > tol).count());
}

bool lu_solve(const Matrix& a, const Vector& b, Vector& x, double pivot_tol) {
  if (a.rows() == 0) {
    x = Vector();
    return true;
  }
  Eigen::PartialPivLU<Matrix> lu(a);
  // The pivots chosen by partial pivoting sit on the diagonal of U.
  if (!(lu.matrixLU().diagonal().cwiseAbs().minCoeff() >= pivot_tol)) return false;
  x = lu.solve(b);
  return true;
}

double condition_number(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

double relative_frobenius(const Matrix& estimate, const Matrix& reference) {
  const double ref = reference.norm();
  const double diff = (estimate - reference).norm();
  return ref > 0.0 ? diff / ref : diff;
}

}  // namespace jacoest
