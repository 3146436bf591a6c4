#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jacoest/nn.hpp"
#include "jacoest/report.hpp"

namespace jacoest {

struct NamedWindow {
  std::string name;
  WindowRange range;
};

/// One experiment: a daily trajectory, the windows cut from it and the noise
/// applied to them. `profile.seed` is overwritten by each run seed.
struct SceneConfig {
  std::string name;
  DailyProfileConfig profile;
  std::vector<NamedWindow> windows;
  std::optional<NoiseSpec> noise;
  bool normalization = false;
};

struct NnConfig {
  NetworkArch arch;
  TrainSettings train;
};

enum class BenchmarkMode { Midpoint, WindowMean };

struct ScenarioConfig {
  std::string name = "scenario";
  std::string case_path = "ieee9";
  std::vector<SceneConfig> scenes;
  std::vector<Method> estimators;
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir;
  GlsSettings gls;
  KronSettings kron;
  NnConfig nn;
  SolveSettings solve;
  BenchmarkMode benchmark = BenchmarkMode::Midpoint;
};

/// Accepts either a "scenes" array or top-level "windows" / "noise" /
/// "normalization" describing a single scene. Top-level "profile" fields are
/// defaults that each scene's "profile" may override. Throws ConfigError.
ScenarioConfig parse_scenario_config(const std::string& json_text);
/// Bare names such as "paper-9bus" are looked up in the bundled configs dir.
ScenarioConfig load_scenario_config(const std::string& path);
std::string resolve_config_path(const std::string& name_or_path);

struct PreparedWindow {
  NamedWindow window;
  SampledSeries series;  // after noise
  std::optional<MeasurementWindow> data;
  std::string error;  // set when the window could not be built
  std::string error_kind;
  JacobianMatrix benchmark;
  int benchmark_sample = 0;
};

struct PreparedScene {
  Trajectory trajectory;
  std::vector<PreparedWindow> windows;
};

/// Trajectory, noisy series, windows and benchmarks for one scene and seed.
PreparedScene prepare_scene(const NetworkCase& c, const ScenarioConfig& cfg, std::size_t scene_index,
                            std::uint64_t seed);

std::uint64_t noise_seed(std::uint64_t seed, std::size_t scene_index, std::size_t window_index);

struct CellResult {
  std::string scene;
  std::string window;
  Method method = Method::LSE;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error_kind;
  std::string error_message;
  JacobianEstimate estimate;
  JacobianMatrix benchmark;
  int benchmark_sample = 0;
  ErrorReport error;
};

struct ScenarioOutcome {
  std::vector<CellResult> cells;

  /// Cells matching scene/window/method, in seed order.
  std::vector<const CellResult*> select(const std::string& scene, const std::string& window,
                                        Method m) const;
};

/// Evaluates every seed x scene x window x estimator cell. Failures are
/// recorded per cell and never stop the run.
ScenarioOutcome run_scenario(const ScenarioConfig& cfg);
ScenarioOutcome run_scenario(const ScenarioConfig& cfg, const NetworkCase& c);

/// Writes cells/<cell>.json, cells/<cell>_estimate.csv, cells/<cell>_error.csv,
/// benchmarks/<scene>__<window>__seed<k>.csv, summary.json and summary.csv.
/// File contents depend only on the config and the results.
void write_reports(const ScenarioConfig& cfg, const ScenarioOutcome& out, const std::string& dir);

std::string summary_json(const ScenarioConfig& cfg, const ScenarioOutcome& out);
std::string summary_csv(const ScenarioOutcome& out);
std::string cell_json(const CellResult& cell);
std::string cell_name(const CellResult& cell);

/// States x and outputs y of every trajectory sample, one column each.
struct TrajectoryData {
  Matrix x;
  Matrix y;
};

TrajectoryData trajectory_data(const NetworkModel& model, const Trajectory& traj);

/// Mean absolute percentage error of predicted P at load buses (positive
/// base-case consumption) over the settings' test range.
double load_bus_mape(const NetworkCase& c, const TrainedNetwork& net, const Matrix& x,
                     const Matrix& y, const SampleRange& range);

}  // namespace jacoest
