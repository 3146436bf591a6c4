#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jacoest/case_io.hpp"
#include "jacoest/jacobian.hpp"
#include "jacoest/powerflow.hpp"
#include "jacoest/random.hpp"

namespace jacoest {

struct Bump {
  double amplitude = 0.0;
  double hour = 12.0;
  double width = 1.0;  // standard deviation in hours
};

/// profile(h) = base + sum_k a_k exp(-(h - h_k)^2 / (2 w_k^2)), h in [0, 24).
struct DailyShape {
  double base = 1.0;
  std::vector<Bump> bumps;

  double at_hour(double hour) const;
  static DailyShape flat(double level = 1.0) { return {level, {}}; }
  /// Morning and evening peaks over a night-time base.
  static DailyShape double_peak();
};

/// Replaces a bus's net consumption in the base case (MW / MVAr).
struct BaseLoad {
  int bus = 0;
  double p_mw = 0.0;
  double q_mvar = 0.0;
};

struct DailyProfileConfig {
  int samples_per_day = 9600;
  /// Number of samples to generate; 0 means samples_per_day.
  int sample_count = 0;
  std::vector<BaseLoad> base_loads;
  DailyShape shape = DailyShape::double_peak();
  /// Jitter at bus i has standard deviation sigma * |S_i| on both P and Q,
  /// where S_i is the bus's base net consumption. It is independent per sample.
  double fluctuation_sigma = 0.01;
  std::uint64_t seed = 0;

  int count() const { return sample_count > 0 ? sample_count : samples_per_day; }
};

/// Solved operating points, one per sample (index 0 is sample 1).
struct Trajectory {
  std::vector<OperatingPoint> points;
  int total_iterations = 0;
};

/// Per-sample targets: profile-scaled base consumption plus jitter, at
/// non-slack buses. Voltage setpoints are held at the case values.
PowerFlowTargets sample_targets(const NetworkCase& c, const DailyProfileConfig& cfg, int sample,
                                Rng& rng);

/// Solves every sample with a warm start from the previous one. A failed
/// solve is rethrown as NonConvergence whose message names the sample.
Trajectory generate_trajectory(const NetworkCase& c, const DailyProfileConfig& cfg,
                               const SolveSettings& settings = {});

/// Points start, start + stride, ..., count of them; 1-based sample indices.
struct WindowRange {
  int start = 1;
  int count = 0;
  int stride = 1;

  int last() const { return start + (count - 1) * stride; }
  /// 1-based sample at the middle point of the window.
  int midpoint() const { return start + (count / 2) * stride; }
};

/// States x and outputs y at the window's sample points, as N x points.
/// A constant measurement bias is kept per row in x_bias / y_bias rather than
/// folded into every sample; the measured value is x + x_bias.
struct SampledSeries {
  Matrix x;
  Matrix y;
  Vector x_bias;
  Vector y_bias;
  std::vector<int> samples;
  std::vector<IndexEntry> x_map;
  std::vector<IndexEntry> y_map;
};

struct MeasurementWindow {
  Matrix a;  // N x T state deltas
  Matrix b;  // N x T output deltas
  std::vector<IndexEntry> a_map;
  std::vector<IndexEntry> b_map;
  std::optional<Vector> scaling_a;  // diagonal of Lambda_A
  std::optional<Vector> scaling_b;

  int t() const { return static_cast<int>(a.cols()); }
  int n() const { return static_cast<int>(a.rows()); }
};

SampledSeries sample_series(const Trajectory& traj, const NetworkModel& model,
                            const WindowRange& range);

/// a[:, k] = x^(k+1) - x^(k), likewise for b. Row biases cancel exactly.
/// Throws WindowTooShort when T <= N.
MeasurementWindow window_from_series(const SampledSeries& s);

MeasurementWindow build_window(const Trajectory& traj, const NetworkModel& model,
                               const WindowRange& range);

enum class NoiseTarget { OutputsY, StatesX, BothWhite };

std::string to_string(NoiseTarget t);
NoiseTarget parse_noise_target(const std::string& text);

/// Extra noise on one bus over a range of window points (1-based, inclusive).
/// Standard deviations are in per unit unless `in_mva` is set, in which case
/// they must be converted with to_per_unit before use.
struct LocalizedNoise {
  int bus = 0;
  double sigma_p = 0.0;
  double sigma_q = 0.0;
  int first = 1;
  int last = 1;
  bool in_mva = false;
};

/// x or y := x or y + alpha1 * r + alpha2, r standard normal, applied to
/// sampled values before differencing. For states_x, `states_angles_only`
/// restricts the noise to the angle coordinates.
struct NoiseSpec {
  NoiseTarget target = NoiseTarget::OutputsY;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  bool states_angles_only = false;
  std::vector<LocalizedNoise> localized;
};

/// Divides MVA-valued localized sigmas by the system base.
NoiseSpec to_per_unit(NoiseSpec spec, double base_mva);

/// Returns a perturbed copy. Localized entries only touch y rows that exist
/// (P at non-slack buses, Q at PQ buses). Throws ConfigError on a range
/// outside the series.
SampledSeries inject_noise(const SampledSeries& s, const NoiseSpec& spec, std::uint64_t seed);

/// Lambda = 1 / population standard deviation of each row; 1 for rows with
/// zero variance. The returned window carries the scalings.
MeasurementWindow normalize_window(const MeasurementWindow& w);

/// Scales rows by the given diagonals.
MeasurementWindow scale_window(const MeasurementWindow& w, const Vector& lambda_a,
                               const Vector& lambda_b);

/// J0 evaluated at one trajectory sample (1-based).
JacobianMatrix benchmark_at(const Trajectory& traj, const NetworkModel& model, int sample);

/// Entrywise mean of J0 over the window's points.
JacobianMatrix benchmark_mean(const Trajectory& traj, const NetworkModel& model,
                              const WindowRange& range);

std::string window_matrix_csv(const Matrix& m, const std::vector<IndexEntry>& rows,
                              const std::vector<int>& samples);

}  // namespace jacoest
