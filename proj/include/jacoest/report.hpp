#pragma once

#include <string>
#include <vector>

#include "jacoest/estimators.hpp"

namespace jacoest {

struct ErrorReport {
  Matrix entrywise;  // estimate - benchmark
  double rel_frobenius = 0.0;
  double max_abs = 0.0;
  std::vector<IndexEntry> row_map;
  std::vector<IndexEntry> col_map;
};

/// Throws DimensionError when shapes or index maps disagree. Empty maps on
/// the estimate are taken to mean "same as the benchmark".
ErrorReport error_metrics(const JacobianEstimate& estimate, const JacobianMatrix& benchmark);
ErrorReport error_metrics(const Matrix& estimate, const JacobianMatrix& benchmark);

struct SeedSummary {
  int count = 0;
  double mean = 0.0;
  double std = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
};

SeedSummary summarize(const std::vector<double>& values);

}  // namespace jacoest
