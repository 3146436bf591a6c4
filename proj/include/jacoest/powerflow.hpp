#pragma once

#include "jacoest/network.hpp"

namespace jacoest {

/// Specified quantities, one entry per bus. p is read at non-slack buses,
/// q at PQ buses, v_set at slack and PV buses.
struct PowerFlowTargets {
  Vector p;
  Vector q;
  Vector v_set;
};

struct SolveSettings {
  double tol = 1e-8;
  int max_iter = 20;
  bool flat_start = true;
  /// Use the central-difference Jacobian inside Newton instead of the analytic one.
  bool fd_jacobian = false;
};

struct SolveResult {
  OperatingPoint point;
  int iterations = 0;
  double final_mismatch = 0.0;
};

/// Newton-Raphson on the reduced system. Without flat_start the free
/// coordinates of `initial` are used as the starting guess.
/// Throws NonConvergence or SingularJacobian.
SolveResult solve_powerflow(const NetworkModel& model, const PowerFlowTargets& targets,
                            const SolveSettings& settings = {},
                            const OperatingPoint* initial = nullptr);

/// Infinity norm of y_target - y(x) over the specified coordinates.
double mismatch_norm(const NetworkModel& model, const PowerFlowTargets& targets,
                     const Vector& v, const Vector& theta);

}  // namespace jacoest
