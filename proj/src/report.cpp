#include "jacoest/report.hpp"

#include <algorithm>
#include <cmath>

#include "jacoest/errors.hpp"
#include "jacoest/linalg.hpp"

namespace jacoest {

ErrorReport error_metrics(const JacobianEstimate& estimate, const JacobianMatrix& benchmark) {
  if ((!estimate.row_map.empty() && estimate.row_map != benchmark.row_map) ||
      (!estimate.col_map.empty() && estimate.col_map != benchmark.col_map))
    throw DimensionError("estimate and benchmark index maps differ");
  return error_metrics(estimate.values, benchmark);
}

ErrorReport error_metrics(const Matrix& estimate, const JacobianMatrix& benchmark) {
  if (estimate.rows() != benchmark.values.rows() || estimate.cols() != benchmark.values.cols())
    throw DimensionError("estimate and benchmark shapes differ");
  ErrorReport r;
  r.entrywise = estimate - benchmark.values;
  r.rel_frobenius = relative_frobenius(estimate, benchmark.values);
  r.max_abs = r.entrywise.size() ? r.entrywise.cwiseAbs().maxCoeff() : 0.0;
  r.row_map = benchmark.row_map;
  r.col_map = benchmark.col_map;
  return r;
}

SeedSummary summarize(const std::vector<double>& values) {
  SeedSummary s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / s.count;
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / s.count);
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  return s;
}

}  // namespace jacoest
