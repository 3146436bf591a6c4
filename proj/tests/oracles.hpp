#pragma once

// Reference computations written independently of the library code paths.

#include <complex>
#include <vector>

#include "jacoest/network.hpp"
#include "jacoest/random.hpp"

namespace oracle {

using jacoest::Complex;
using jacoest::ComplexMatrix;
using jacoest::Matrix;
using jacoest::Vector;

/// S_i = U_i * conj(sum_k y_ik U_k) with shunt terms added the same way the
/// bus model does: P -= V^2 g, Q += V^2 b.
inline std::pair<Vector, Vector> complex_power(const ComplexMatrix& y, const Vector& v,
                                               const Vector& theta, const Vector& g,
                                               const Vector& b) {
  const auto n = v.size();
  Eigen::VectorXcd u(n);
  for (Eigen::Index i = 0; i < n; ++i) u(i) = std::polar(v(i), theta(i));
  const Eigen::VectorXcd cur = y * u;
  Vector p(n), q(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex s = u(i) * std::conj(cur(i));
    p(i) = s.real() - v(i) * v(i) * g(i);
    q(i) = s.imag() + v(i) * v(i) * b(i);
  }
  return {p, q};
}

/// Admittance matrix with the negated-sum diagonal, built directly from an
/// edge list.
inline ComplexMatrix admittance(int n, const std::vector<jacoest::BranchSpec>& branches) {
  ComplexMatrix y = ComplexMatrix::Zero(n, n);
  for (const auto& br : branches) {
    y(br.from - 1, br.to - 1) += Complex(br.g, br.b);
    y(br.to - 1, br.from - 1) += Complex(br.g, br.b);
  }
  for (int i = 0; i < n; ++i) y(i, i) = -(y.row(i).sum() - y(i, i));
  return y;
}

/// Random connected network: a spanning chain plus random extra branches.
/// Bus 1 is slack, the next `pv` buses are PV, the rest PQ.
struct RandomNet {
  std::vector<jacoest::BusSpec> buses;
  std::vector<jacoest::BranchSpec> branches;
};

inline RandomNet random_network(jacoest::Rng& rng, int n, int pv, bool shunts) {
  RandomNet r;
  for (int i = 1; i <= n; ++i) {
    jacoest::BusSpec b;
    b.id = i;
    b.role = i == 1 ? jacoest::BusRole::Slack
                    : (i <= 1 + pv ? jacoest::BusRole::PV : jacoest::BusRole::PQ);
    if (shunts) {
      b.shunt_g = rng.uniform(0.0, 0.05);
      b.shunt_b = rng.uniform(0.0, 0.3);
    }
    r.buses.push_back(b);
  }
  auto line = [&](int a, int b) {
    const Complex z(rng.uniform(0.005, 0.05), rng.uniform(0.05, 0.3));
    const Complex y = 1.0 / z;
    r.branches.push_back({a, b, y.real(), y.imag()});
  };
  for (int i = 2; i <= n; ++i) line(static_cast<int>(rng.uniform(1.0, i - 0.001)), i);
  for (int extra = 0; extra < n / 2; ++extra) {
    const int a = 1 + static_cast<int>(rng.uniform(0.0, n - 0.001));
    const int b = 1 + static_cast<int>(rng.uniform(0.0, n - 0.001));
    if (a != b) line(a, b);
  }
  return r;
}

/// Row standard deviation by explicit summation (divides by the count).
inline double row_std(const Matrix& m, Eigen::Index r) {
  double sum = 0.0;
  for (Eigen::Index c = 0; c < m.cols(); ++c) sum += m(r, c);
  const double mean = sum / static_cast<double>(m.cols());
  double sq = 0.0;
  for (Eigen::Index c = 0; c < m.cols(); ++c) sq += (m(r, c) - mean) * (m(r, c) - mean);
  return std::sqrt(sq / static_cast<double>(m.cols()));
}

inline Matrix random_matrix(jacoest::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.normal();
  return m;
}

}  // namespace oracle
