#include "jacoest/jacobian.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "jacoest/errors.hpp"

namespace jacoest {

JacobianBlocks jacobian_blocks(const NetworkModel& model, const OperatingPoint& point) {
  const int n = model.bus_count();
  if (point.v.size() != n || point.theta.size() != n)
    throw DimensionError("operating point does not match the network");
  const auto& y = model.admittance();
  const Vector& v = point.v;
  const Vector& th = point.theta;
  // Injections are recomputed so the blocks are valid at unsolved points too.
  const auto inj = compute_injections(model, v, th);

  JacobianBlocks b{Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double g = y(i, j).real(), bb = y(i, j).imag();
      if (i != j && g == 0.0 && bb == 0.0) continue;
      const double t = th(i) - th(j);
      const double c = std::cos(t), s = std::sin(t);
      const double vv = v(i) * v(j);
      const double hl = vv * (g * s - bb * c);
      const double nk = vv * (g * c + bb * s);
      b.h(i, j) = hl;
      b.l(i, j) = hl;
      b.n_blk(i, j) = nk;
      b.k(i, j) = -nk;
    }
    const double vi2 = v(i) * v(i);
    const double gi = model.shunt_g()(i), bi = model.shunt_b()(i);
    b.h(i, i) += -inj.q(i) + vi2 * bi;
    b.n_blk(i, i) += inj.p(i) - vi2 * gi;
    b.k(i, i) += inj.p(i) + vi2 * gi;
    b.l(i, i) += inj.q(i) + vi2 * bi;
  }
  return b;
}

JacobianMatrix assemble_jacobian(const JacobianBlocks& blocks, const NetworkModel& model) {
  const int n = model.bus_count();
  for (const Matrix* m : {&blocks.h, &blocks.n_blk, &blocks.k, &blocks.l})
    if (m->rows() != n || m->cols() != n) throw DimensionError("Jacobian blocks do not match network");
  const auto& lay = model.layout();
  const auto& ns = lay.non_slack();
  const auto& pq = lay.pq();
  const int a = lay.angle_count();
  JacobianMatrix j;
  j.values = Matrix::Zero(lay.dim(), lay.dim());
  for (int r = 0; r < a; ++r) {
    for (int c = 0; c < a; ++c) j.values(r, c) = blocks.h(ns[r], ns[c]);
    for (std::size_t c = 0; c < pq.size(); ++c) j.values(r, a + c) = blocks.n_blk(ns[r], pq[c]);
  }
  for (std::size_t r = 0; r < pq.size(); ++r) {
    for (int c = 0; c < a; ++c) j.values(a + r, c) = blocks.k(pq[r], ns[c]);
    for (std::size_t c = 0; c < pq.size(); ++c) j.values(a + r, a + c) = blocks.l(pq[r], pq[c]);
  }
  j.row_map = lay.row_map();
  j.col_map = lay.col_map();
  return j;
}

JacobianMatrix analytic_jacobian(const NetworkModel& model, const OperatingPoint& point) {
  return assemble_jacobian(jacobian_blocks(model, point), model);
}

JacobianMatrix finite_difference_jacobian(const NetworkModel& model, const OperatingPoint& point,
                                          double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  const int n = model.bus_count();
  if (point.v.size() != n || point.theta.size() != n)
    throw DimensionError("operating point does not match the network");
  const auto& lay = model.layout();
  const int dim = lay.dim();
  const Vector x0 = lay.state(point.v, point.theta);
  JacobianMatrix j;
  j.values = Matrix::Zero(dim, dim);
  auto eval = [&](const Vector& x) {
    Vector v = point.v, th = point.theta;
    lay.apply_state(x, v, th);
    const auto inj = compute_injections(model, v, th);
    return lay.output(inj.p, inj.q);
  };
  for (int c = 0; c < dim; ++c) {
    Vector xp = x0, xm = x0;
    xp(c) += step;
    xm(c) -= step;
    Vector col = (eval(xp) - eval(xm)) / (2.0 * step);
    if (c >= lay.angle_count()) col *= x0(c);
    j.values.col(c) = col;
  }
  j.row_map = lay.row_map();
  j.col_map = lay.col_map();
  return j;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string matrix_to_csv(const Matrix& m, const std::vector<IndexEntry>& rows,
                          const std::vector<IndexEntry>& cols) {
  std::ostringstream os;
  os << "# rows: " << to_string(rows) << '\n';
  os << "# cols: " << to_string(cols) << '\n';
  os << "row";
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    os << ',' << (c < static_cast<Eigen::Index>(cols.size()) ? to_string(cols[c]) : std::to_string(c));
  os << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    os << (r < static_cast<Eigen::Index>(rows.size()) ? to_string(rows[r]) : std::to_string(r));
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << ',' << format_double(m(r, c));
    os << '\n';
  }
  return os.str();
}

std::string jacobian_to_csv(const JacobianMatrix& j) {
  return matrix_to_csv(j.values, j.row_map, j.col_map);
}

}  // namespace jacoest
