#include "jacoest/powerflow.hpp"

#include <cmath>

#include "jacoest/errors.hpp"
#include "jacoest/jacobian.hpp"
#include "jacoest/linalg.hpp"

namespace jacoest {

namespace {

void check_targets(const NetworkModel& model, const PowerFlowTargets& t) {
  const int n = model.bus_count();
  if (t.p.size() != n || t.q.size() != n || t.v_set.size() != n)
    throw DimensionError("power-flow targets need one entry per bus");
  for (int i = 0; i < n; ++i)
    if (model.role(i) != BusRole::PQ && !(t.v_set(i) > 0.0))
      throw DimensionError("voltage setpoint of bus " + std::to_string(i + 1) + " must be positive");
}

}  // namespace

double mismatch_norm(const NetworkModel& model, const PowerFlowTargets& targets,
                     const Vector& v, const Vector& theta) {
  const auto& lay = model.layout();
  const auto inj = compute_injections(model, v, theta);
  const Vector r = lay.output(targets.p, targets.q) - lay.output(inj.p, inj.q);
  return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
}

SolveResult solve_powerflow(const NetworkModel& model, const PowerFlowTargets& targets,
                            const SolveSettings& settings, const OperatingPoint* initial) {
  check_targets(model, targets);
  if (!(settings.tol > 0.0) || settings.max_iter < 1)
    throw std::invalid_argument("solve settings need tol > 0 and max_iter >= 1");
  const int n = model.bus_count();
  const auto& lay = model.layout();

  Vector v = Vector::Ones(n), th = Vector::Zero(n);
  if (!settings.flat_start && initial) {
    if (initial->v.size() != n || initial->theta.size() != n)
      throw DimensionError("initial point does not match the network");
    v = initial->v;
    th = initial->theta;
  }
  for (int i = 0; i < n; ++i) {
    if (model.role(i) != BusRole::PQ) v(i) = targets.v_set(i);
    if (model.role(i) == BusRole::Slack) th(i) = 0.0;
  }
  const Vector y_target = lay.output(targets.p, targets.q);
  const int a = lay.angle_count();

  double mis = 0.0;
  for (int it = 0;; ++it) {
    auto pt = make_operating_point(model, v, th);
    const Vector r = y_target - lay.output(pt.p, pt.q);
    mis = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
    if (!std::isfinite(mis)) throw NonConvergence(it, mis);
    if (mis <= settings.tol) {
      pt.solved = true;
      return {std::move(pt), it, mis};
    }
    if (it == settings.max_iter) throw NonConvergence(it, mis);

    const Matrix j = settings.fd_jacobian ? finite_difference_jacobian(model, pt).values
                                          : analytic_jacobian(model, pt).values;
    Vector dx;
    if (!lu_solve(j, r, dx)) throw SingularJacobian(it);
    // The V columns carry a factor V_j, so their increments are relative.
    for (int c = 0; c < a; ++c) th(lay.non_slack()[c]) += dx(c);
    for (int c = 0; c < lay.magnitude_count(); ++c) v(lay.pq()[c]) *= 1.0 + dx(a + c);
    for (int c = 0; c < lay.magnitude_count(); ++c)
      if (!(v(lay.pq()[c]) > 0.0)) throw NonConvergence(it + 1, mis);
  }
}

}  // namespace jacoest
