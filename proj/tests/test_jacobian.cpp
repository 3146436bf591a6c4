#include <doctest.h>

#include <stdexcept>

#include "jacoest/case_io.hpp"
#include "jacoest/jacobian.hpp"
#include "jacoest/linalg.hpp"
#include "jacoest/powerflow.hpp"
#include "jacoest/scenario.hpp"
#include "oracles.hpp"

using namespace jacoest;

namespace {

NetworkModel two_bus(double b2 = 0.0) {
  return build_network({{1, BusRole::Slack}, {2, BusRole::PQ, 0.0, b2}}, {{1, 2, 1.0, -10.0}});
}

OperatingPoint toy_point(const NetworkModel& m) {
  Vector v(2), th(2);
  v << 1.0, 0.98;
  th << 0.0, -0.02;
  return make_operating_point(m, v, th);
}

OperatingPoint solved_ieee9(const NetworkCase& c) {
  return solve_powerflow(c.model, {c.p_net, c.q_net, c.v_set}).point;
}

// Central differences computed here from the complex-power formula, so the
// check does not reuse the library's finite-difference routine.
Matrix oracle_fd(const NetworkModel& m, const OperatingPoint& pt, double h) {
  const auto& lay = m.layout();
  const int dim = lay.dim();
  Matrix j(dim, dim);
  const Vector x0 = lay.state(pt.v, pt.theta);
  auto y_of = [&](const Vector& x) {
    Vector v = pt.v, th = pt.theta;
    lay.apply_state(x, v, th);
    const auto [p, q] = oracle::complex_power(m.admittance(), v, th, m.shunt_g(), m.shunt_b());
    return lay.output(p, q);
  };
  for (int c = 0; c < dim; ++c) {
    Vector a = x0, b = x0;
    a(c) += h;
    b(c) -= h;
    j.col(c) = (y_of(a) - y_of(b)) / (2 * h) * (c >= lay.angle_count() ? x0(c) : 1.0);
  }
  return j;
}

}  // namespace

TEST_CASE("flat start without shunts: H_ij = -B_ij and N_ij = G_ij off the diagonal") {
  Rng rng(1);
  const auto net = oracle::random_network(rng, 5, 1, false);
  const auto m = build_network(net.buses, net.branches);
  const auto b = jacobian_blocks(m, flat_point(m));
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (i != j) {
        CHECK(b.h(i, j) == doctest::Approx(-m.admittance()(i, j).imag()));
        CHECK(b.n_blk(i, j) == doctest::Approx(m.admittance()(i, j).real()));
      }
}

TEST_CASE("two-bus toy H22 equals -V2^2 B22 - Q2 and the oracle") {
  const auto m = two_bus();
  const auto pt = toy_point(m);
  const auto b = jacobian_blocks(m, pt);
  const double b22 = m.admittance()(1, 1).imag();
  CHECK(b22 == doctest::Approx(10.0));
  CHECK(b.h(1, 1) == doctest::Approx(-0.98 * 0.98 * b22 - pt.q(1)).epsilon(1e-12));
  const Matrix fd = oracle_fd(m, pt, 1e-6);
  CHECK(b.h(1, 1) == doctest::Approx(fd(0, 0)).epsilon(1e-7));
}

TEST_CASE("two-bus assembled Jacobian is [[H22, N22], [K22, L22]]") {
  const auto m = two_bus(0.05);
  const auto pt = toy_point(m);
  const auto b = jacobian_blocks(m, pt);
  const auto j = assemble_jacobian(b, m);
  REQUIRE(j.dim() == 2);
  CHECK(j.values(0, 0) == b.h(1, 1));
  CHECK(j.values(0, 1) == b.n_blk(1, 1));
  CHECK(j.values(1, 0) == b.k(1, 1));
  CHECK(j.values(1, 1) == b.l(1, 1));
  CHECK(relative_frobenius(j.values, oracle_fd(m, pt, 1e-6)) < 1e-7);
}

TEST_CASE("flat-start angle derivatives of the two-bus toy") {
  const auto m = two_bus();
  const auto j = finite_difference_jacobian(m, flat_point(m), 1e-6);
  // dP2/dtheta2 = -V2^2 B22 - Q2 = B12 = -10 with B22 = +10, Q2 = 0.
  CHECK(j.values(0, 0) == doctest::Approx(-10.0).epsilon(1e-8));
  CHECK(analytic_jacobian(m, flat_point(m)).values(0, 0) == doctest::Approx(-10.0));
  // The cross term dP2/dtheta1 is -B12 = +10.
  CHECK(jacobian_blocks(m, flat_point(m)).h(1, 0) == doctest::Approx(10.0));
}

TEST_CASE("9-bus Jacobian is 14 x 14 with Eq-8 block sizes") {
  const auto c = load_case("ieee9");
  const auto j = analytic_jacobian(c.model, solved_ieee9(c));
  CHECK(j.dim() == 14);
  CHECK(c.model.layout().angle_count() == 8);      // n - 1
  CHECK(c.model.layout().magnitude_count() == 6);  // n - m - 1
  CHECK(j.row_map.size() == 14);
  CHECK(j.col_map.size() == 14);
}

TEST_CASE("9-bus analytic Jacobian matches both finite-difference oracles") {
  const auto c = load_case("ieee9");
  const auto pt = solved_ieee9(c);
  const auto j = analytic_jacobian(c.model, pt);
  const auto fd = finite_difference_jacobian(c.model, pt, 1e-6);
  CHECK(relative_frobenius(j.values, fd.values) < 1e-6);
  CHECK(relative_frobenius(j.values, oracle_fd(c.model, pt, 1e-6)) < 1e-6);
}

TEST_CASE("property: analytic equals finite differences on random networks and states") {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 5;
    const auto net = oracle::random_network(rng, n, trial % 2 ? 1 : 0, true);
    const auto m = build_network(net.buses, net.branches);
    Vector v(n), th(n);
    for (int i = 0; i < n; ++i) {
      v(i) = rng.uniform(0.9, 1.1);
      th(i) = rng.uniform(-0.3, 0.3);
    }
    const auto pt = make_operating_point(m, v, th);
    const auto j = analytic_jacobian(m, pt);
    CHECK(relative_frobenius(j.values, finite_difference_jacobian(m, pt, 1e-6).values) < 1e-6);
  }
}

TEST_CASE("property: block structure identities") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 4;
    const auto net = oracle::random_network(rng, n, 1, true);
    const auto m = build_network(net.buses, net.branches);
    Vector v(n), th(n);
    for (int i = 0; i < n; ++i) {
      v(i) = rng.uniform(0.9, 1.1);
      th(i) = rng.uniform(-0.3, 0.3);
    }
    const auto pt = make_operating_point(m, v, th);
    const auto b = jacobian_blocks(m, pt);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        if (i == k) continue;
        CHECK(b.h(i, k) == b.l(i, k));
        CHECK(b.n_blk(i, k) == -b.k(i, k));
        if (!m.adjacent(i, k)) {
          CHECK(b.h(i, k) == 0.0);
          CHECK(b.n_blk(i, k) == 0.0);
        }
      }
      // Diagonal identity with the bus shunt.
      const double bii = m.admittance()(i, i).imag();
      CHECK(b.h(i, i) == doctest::Approx(-v(i) * v(i) * bii - pt.q(i) + v(i) * v(i) * m.shunt_b()(i)));
    }
  }
}

TEST_CASE("sparsity of the reduced Jacobian mirrors the topology") {
  const auto c = load_case("ieee9");
  const auto j = analytic_jacobian(c.model, solved_ieee9(c));
  for (int r = 0; r < j.dim(); ++r)
    for (int col = 0; col < j.dim(); ++col) {
      const int bi = j.row_map[r].bus - 1, bk = j.col_map[col].bus - 1;
      if (bi != bk && !c.model.adjacent(bi, bk)) CHECK(j.values(r, col) == 0.0);
    }
}

TEST_CASE("finite differences converge at second order and reject bad steps") {
  const auto c = load_case("ieee9");
  const auto pt = solved_ieee9(c);
  const auto exact = analytic_jacobian(c.model, pt).values;
  const double e1 = (finite_difference_jacobian(c.model, pt, 2e-2).values - exact).norm();
  const double e2 = (finite_difference_jacobian(c.model, pt, 1e-2).values - exact).norm();
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
  CHECK_THROWS_AS(finite_difference_jacobian(c.model, pt, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(finite_difference_jacobian(c.model, pt, -1e-6), std::invalid_argument);
}

TEST_CASE("J0 is stable over a daily trajectory") {
  const auto c = load_case("ieee9");
  DailyProfileConfig cfg;
  cfg.sample_count = 960;
  cfg.samples_per_day = 960;
  cfg.seed = 4;
  const auto traj = generate_trajectory(c, cfg);
  const int dim = c.model.layout().dim();
  Matrix mean = Matrix::Zero(dim, dim), sq = Matrix::Zero(dim, dim);
  for (const auto& pt : traj.points) {
    const Matrix j = analytic_jacobian(c.model, pt).values;
    mean += j;
    sq += j.cwiseAbs2();
  }
  const double count = static_cast<double>(traj.points.size());
  mean /= count;
  const Matrix stdev = (sq / count - mean.cwiseAbs2()).cwiseMax(0.0).cwiseSqrt();
  CHECK(stdev.maxCoeff() < 0.1 * mean.cwiseAbs().maxCoeff());
}

TEST_CASE("CSV output carries the index maps") {
  const auto m = two_bus();
  const auto csv = jacobian_to_csv(analytic_jacobian(m, toy_point(m)));
  CHECK(csv.find("# rows: P2,Q2") == 0);
  CHECK(csv.find("# cols: theta2,V2") != std::string::npos);
  CHECK(csv.find("row,theta2,V2\nP2,") != std::string::npos);
}
