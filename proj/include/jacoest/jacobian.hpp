#pragma once

#include <string>
#include <vector>

#include "jacoest/network.hpp"

namespace jacoest {

/// Full n x n blocks indexed by bus pairs. N and L are derivatives with
/// respect to V_j multiplied by V_j.
struct JacobianBlocks {
  Matrix h;
  Matrix n_blk;
  Matrix k;
  Matrix l;
};

/// Reduced N x N Jacobian with row (P/Q, bus) and column (theta/V, bus) labels.
struct JacobianMatrix {
  Matrix values;
  std::vector<IndexEntry> row_map;
  std::vector<IndexEntry> col_map;

  int dim() const { return static_cast<int>(values.rows()); }
};

JacobianBlocks jacobian_blocks(const NetworkModel& model, const OperatingPoint& point);

/// Keeps P rows / theta columns of non-slack buses and Q rows / V columns of
/// PQ buses, in the model's layout order.
JacobianMatrix assemble_jacobian(const JacobianBlocks& blocks, const NetworkModel& model);

/// Convenience: blocks + assembly.
JacobianMatrix analytic_jacobian(const NetworkModel& model, const OperatingPoint& point);

/// Central differences of y(x) with the V columns scaled by V_j.
/// Throws std::invalid_argument if step <= 0.
JacobianMatrix finite_difference_jacobian(const NetworkModel& model, const OperatingPoint& point,
                                          double step = 1e-6);

/// 17 significant digits, enough to round-trip a double.
std::string format_double(double x);

/// CSV with the maps as leading comment lines, then one row per matrix row.
std::string jacobian_to_csv(const JacobianMatrix& j);
std::string matrix_to_csv(const Matrix& m, const std::vector<IndexEntry>& rows,
                          const std::vector<IndexEntry>& cols);

}  // namespace jacoest
