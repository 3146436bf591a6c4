#include "jacoest/harness.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "jacoest/errors.hpp"
#include "jacoest/linalg.hpp"

namespace jacoest {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

DailyProfileConfig parse_profile(const json& j) {
  DailyProfileConfig p;
  if (!j.is_object()) throw ConfigError("'profile' must be an object");
  p.samples_per_day = get_or(j, "samples_per_day", p.samples_per_day);
  p.sample_count = get_or(j, "sample_count", p.sample_count);
  p.fluctuation_sigma = get_or(j, "fluctuation_sigma", p.fluctuation_sigma);
  if (j.contains("shape")) {
    const auto& s = j["shape"];
    p.shape.base = get_or(s, "base", 1.0);
    p.shape.bumps.clear();
    if (s.contains("bumps")) {
      for (const auto& b : s["bumps"])
        p.shape.bumps.push_back({get_or(b, "amplitude", 0.0), get_or(b, "hour", 12.0),
                                 get_or(b, "width", 1.0)});
    }
  }
  if (j.contains("base_loads")) {
    for (const auto& b : j["base_loads"]) {
      if (!b.contains("bus")) throw ConfigError("base load entry needs 'bus'");
      p.base_loads.push_back({b["bus"].get<int>(), get_or(b, "p_mw", 0.0), get_or(b, "q_mvar", 0.0)});
    }
  }
  return p;
}

NoiseSpec parse_noise(const json& j) {
  NoiseSpec n;
  n.target = parse_noise_target(get_or<std::string>(j, "target", "outputs_y"));
  n.alpha1 = get_or(j, "alpha1", 0.0);
  n.alpha2 = get_or(j, "alpha2", 0.0);
  const auto states = get_or<std::string>(j, "states", "all");
  if (states != "all" && states != "angles")
    throw ConfigError("noise 'states' must be 'all' or 'angles'");
  n.states_angles_only = states == "angles";
  if (!(n.alpha1 >= 0.0)) throw ConfigError("alpha1 must be nonnegative");
  if (j.contains("localized")) {
    for (const auto& l : j["localized"]) {
      LocalizedNoise loc;
      loc.bus = get_or(l, "bus", 0);
      if (l.contains("mva")) {
        const auto v = l["mva"].get<std::vector<double>>();
        if (v.size() != 2) throw ConfigError("localized 'mva' must be [P, Q]");
        loc.sigma_p = v[0];
        loc.sigma_q = v[1];
        loc.in_mva = true;
      } else {
        const auto v = get_or(l, "sigma_pu", std::vector<double>{0.0, 0.0});
        if (v.size() != 2) throw ConfigError("localized 'sigma_pu' must be [P, Q]");
        loc.sigma_p = v[0];
        loc.sigma_q = v[1];
      }
      const auto pts = get_or(l, "points", std::vector<int>{});
      if (pts.size() != 2) throw ConfigError("localized 'points' must be [first, last]");
      loc.first = pts[0];
      loc.last = pts[1];
      n.localized.push_back(loc);
    }
  }
  return n;
}

std::vector<NamedWindow> parse_windows(const json& j) {
  std::vector<NamedWindow> out;
  if (!j.is_array()) throw ConfigError("'windows' must be an array");
  for (const auto& w : j) {
    NamedWindow nw;
    nw.name = get_or<std::string>(w, "name", "window" + std::to_string(out.size() + 1));
    nw.range.start = get_or(w, "start", 1);
    nw.range.count = get_or(w, "count", 0);
    nw.range.stride = get_or(w, "stride", 1);
    if (nw.range.count < 2 || nw.range.stride < 1 || nw.range.start < 1)
      throw ConfigError("window '" + nw.name + "' needs start >= 1, count >= 2, stride >= 1");
    out.push_back(nw);
  }
  return out;
}

SampleRange parse_range(const json& j, const char* key, SampleRange fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = j[key].get<std::vector<int>>();
  if (v.size() != 2) throw ConfigError(std::string("'") + key + "' must be [first, last]");
  return {v[0], v[1]};
}

}  // namespace

ScenarioConfig parse_scenario_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("scenario config must be an object");

  ScenarioConfig cfg;
  try {
    cfg.name = get_or<std::string>(doc, "name", cfg.name);
    cfg.case_path = get_or<std::string>(doc, "case", cfg.case_path);
    cfg.output_dir = get_or<std::string>(doc, "output_dir", "");

    if (!doc.contains("estimators") || !doc["estimators"].is_array() || doc["estimators"].empty())
      throw ConfigError("config needs a nonempty 'estimators' list");
    for (const auto& e : doc["estimators"]) cfg.estimators.push_back(parse_method(e.get<std::string>()));

    if (doc.contains("seeds")) {
      cfg.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();
      if (cfg.seeds.empty()) throw ConfigError("'seeds' must not be empty");
    }

    const std::string bench = get_or<std::string>(doc, "benchmark", "midpoint");
    if (bench == "midpoint") cfg.benchmark = BenchmarkMode::Midpoint;
    else if (bench == "window_mean") cfg.benchmark = BenchmarkMode::WindowMean;
    else throw ConfigError("'benchmark' must be 'midpoint' or 'window_mean'");

    if (doc.contains("gls")) {
      cfg.gls.iterations = get_or(doc["gls"], "iterations", cfg.gls.iterations);
      cfg.gls.early_exit_tol = get_or(doc["gls"], "early_exit_tol", cfg.gls.early_exit_tol);
      if (cfg.gls.iterations < 1) throw ConfigError("gls.iterations must be at least 1");
    }
    if (doc.contains("kron")) {
      const double mb = get_or(doc["kron"], "memory_budget_mb", 16.0);
      if (!(mb > 0.0)) throw ConfigError("kron.memory_budget_mb must be positive");
      cfg.kron.memory_budget_bytes = static_cast<std::size_t>(mb * 1024.0 * 1024.0);
    }
    if (doc.contains("solver")) {
      cfg.solve.tol = get_or(doc["solver"], "tol", cfg.solve.tol);
      cfg.solve.max_iter = get_or(doc["solver"], "max_iter", cfg.solve.max_iter);
    }
    if (doc.contains("nn")) {
      const auto& n = doc["nn"];
      cfg.nn.arch.layer_sizes = get_or(n, "layer_sizes", cfg.nn.arch.layer_sizes);
      cfg.nn.arch.hidden = parse_activation(get_or<std::string>(n, "hidden", "tanh"));
      cfg.nn.arch.output = parse_activation(get_or<std::string>(n, "output", "identity"));
      cfg.nn.train.epochs = get_or(n, "epochs", cfg.nn.train.epochs);
      cfg.nn.train.learning_rate = get_or(n, "learning_rate", cfg.nn.train.learning_rate);
      cfg.nn.train.log_every = get_or(n, "log_every", cfg.nn.train.log_every);
      cfg.nn.train.train_range = parse_range(n, "train", cfg.nn.train.train_range);
      cfg.nn.train.test_range = parse_range(n, "test", cfg.nn.train.test_range);
    }

    const json base_profile = doc.value("profile", json::object());
    const bool base_norm = get_or(doc, "normalization", false);
    auto make_scene = [&](const json& s, const std::string& fallback_name) {
      SceneConfig sc;
      sc.name = get_or<std::string>(s, "name", fallback_name);
      json merged = base_profile;
      if (s.contains("profile")) merged.merge_patch(s["profile"]);
      sc.profile = parse_profile(merged);
      if (!s.contains("windows")) throw ConfigError("scene '" + sc.name + "' has no windows");
      sc.windows = parse_windows(s["windows"]);
      if (s.contains("noise") && !s["noise"].is_null()) sc.noise = parse_noise(s["noise"]);
      sc.normalization = get_or(s, "normalization", base_norm);
      return sc;
    };
    if (doc.contains("scenes")) {
      for (const auto& s : doc["scenes"]) cfg.scenes.push_back(make_scene(s, "scene" + std::to_string(cfg.scenes.size() + 1)));
    } else {
      cfg.scenes.push_back(make_scene(doc, "main"));
      cfg.scenes.back().name = "main";
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario config: ") + e.what());
  }

  std::size_t window_count = 0;
  for (const auto& s : cfg.scenes) window_count += s.windows.size();
  if (window_count == 0) throw ConfigError("config needs at least one window");
  return cfg;
}

std::string resolve_config_path(const std::string& name_or_path) {
  if (fs::exists(name_or_path)) return name_or_path;
  for (const fs::path& candidate : {fs::path(JACOEST_CONFIG_DIR) / name_or_path,
                                   fs::path(JACOEST_CONFIG_DIR) / (name_or_path + ".json")}) {
    if (fs::exists(candidate)) return candidate.string();
  }
  return name_or_path;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  const std::string resolved = resolve_config_path(path);
  std::ifstream in(resolved);
  if (!in) throw ConfigError("cannot open scenario config '" + resolved + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_config(ss.str());
}

std::uint64_t noise_seed(std::uint64_t seed, std::size_t scene_index, std::size_t window_index) {
  return mix_seed(mix_seed(seed, 0x6e6f697365ULL + scene_index), window_index);
}

namespace {

DailyProfileConfig seeded_profile(const SceneConfig& scene, std::uint64_t seed) {
  DailyProfileConfig p = scene.profile;
  p.seed = seed;
  return p;
}

// Scenes with equal profiles share one trajectory per seed.
std::string profile_key(const DailyProfileConfig& p) {
  std::ostringstream os;
  os << p.samples_per_day << '|' << p.count() << '|' << format_double(p.fluctuation_sigma) << '|'
     << p.seed << '|' << format_double(p.shape.base);
  for (const auto& b : p.shape.bumps)
    os << '|' << format_double(b.amplitude) << ',' << format_double(b.hour) << ','
       << format_double(b.width);
  for (const auto& b : p.base_loads)
    os << "|L" << b.bus << ',' << format_double(b.p_mw) << ',' << format_double(b.q_mvar);
  return os.str();
}

std::string error_kind(const std::exception_ptr& p) {
  try {
    std::rethrow_exception(p);
  } catch (const WindowTooShort&) {
    return "WindowTooShort";
  } catch (const SingularV22&) {
    return "SingularV22";
  } catch (const MemoryBudgetExceeded&) {
    return "MemoryBudgetExceeded";
  } catch (const NonConvergence&) {
    return "NonConvergence";
  } catch (const SingularJacobian&) {
    return "SingularJacobian";
  } catch (const TrainingDiverged&) {
    return "TrainingDiverged";
  } catch (const NumericalError&) {
    return "NumericalError";
  } catch (const ConfigError&) {
    return "ConfigError";
  } catch (const std::exception&) {
    return "Error";
  }
}

PreparedScene prepare_with(const NetworkCase& c, const ScenarioConfig& cfg, std::size_t scene_index,
                           std::uint64_t seed, Trajectory traj) {
  const auto& scene = cfg.scenes.at(scene_index);
  PreparedScene ps;
  ps.trajectory = std::move(traj);
  for (std::size_t wi = 0; wi < scene.windows.size(); ++wi) {
    PreparedWindow pw;
    pw.window = scene.windows[wi];
    try {
      pw.series = sample_series(ps.trajectory, c.model, pw.window.range);
      if (scene.noise)
        pw.series = inject_noise(pw.series, to_per_unit(*scene.noise, c.model.base_mva()),
                                 noise_seed(seed, scene_index, wi));
      pw.benchmark_sample = pw.window.range.midpoint();
      pw.benchmark = cfg.benchmark == BenchmarkMode::Midpoint
                         ? benchmark_at(ps.trajectory, c.model, pw.benchmark_sample)
                         : benchmark_mean(ps.trajectory, c.model, pw.window.range);
      pw.data = window_from_series(pw.series);
    } catch (const std::exception& e) {
      pw.error = e.what();
      pw.error_kind = error_kind(std::current_exception());
    }
    ps.windows.push_back(std::move(pw));
  }
  return ps;
}

struct NnOutcome {
  std::optional<TrainResult> result;
  Matrix x;
  Matrix y;
  std::string error;
  std::string kind;
};

NnOutcome train_on(const NetworkCase& c, const ScenarioConfig& cfg, const Trajectory& traj,
                   std::uint64_t seed) {
  NnOutcome o;
  auto data = trajectory_data(c.model, traj);
  o.x = std::move(data.x);
  o.y = std::move(data.y);
  TrainSettings ts = cfg.nn.train;
  ts.seed = seed;
  try {
    o.result = train_network(o.x, o.y, cfg.nn.arch, ts);
  } catch (const std::exception& e) {
    o.error = e.what();
    o.kind = error_kind(std::current_exception());
  }
  return o;
}

void nn_cell(CellResult& cell, const NetworkCase& c, const ScenarioConfig& cfg,
             const PreparedScene& ps, const PreparedWindow& pw, const NnOutcome& nn) {
  if (!nn.result) {
    cell.error_kind = nn.kind;
    cell.error_message = nn.error;
    return;
  }
  const auto& net = nn.result->net;
  const auto& lay = c.model.layout();
  auto state_at = [&](int sample) {
    const auto& pt = ps.trajectory.points[static_cast<std::size_t>(sample - 1)];
    return lay.state(pt.v, pt.theta);
  };
  cell.estimate.method = Method::NN;
  cell.estimate.row_map = lay.row_map();
  cell.estimate.col_map = lay.col_map();
  cell.estimate.values = network_jacobian(net, state_at(pw.benchmark_sample));
  double acc = 0.0;
  for (int sample : pw.series.samples) {
    const auto j0 = benchmark_at(ps.trajectory, c.model, sample);
    acc += relative_frobenius(network_jacobian(net, state_at(sample)), j0.values);
  }
  auto& d = cell.estimate.diagnostics;
  d.emplace_back("window_mean_rel_frobenius", acc / static_cast<double>(pw.series.samples.size()));
  d.emplace_back("train_final_loss", nn.result->train_loss.back());
  if (!nn.result->test_loss.empty()) d.emplace_back("test_final_loss", nn.result->test_loss.back().second);
  if (cfg.nn.train.test_range.size() > 0)
    d.emplace_back("test_mape_load_p", load_bus_mape(c, net, nn.x, nn.y, cfg.nn.train.test_range));
  cell.error = error_metrics(cell.estimate, pw.benchmark);
  cell.ok = true;
}

}  // namespace

PreparedScene prepare_scene(const NetworkCase& c, const ScenarioConfig& cfg, std::size_t scene_index,
                            std::uint64_t seed) {
  const auto profile = seeded_profile(cfg.scenes.at(scene_index), seed);
  return prepare_with(c, cfg, scene_index, seed, generate_trajectory(c, profile, cfg.solve));
}

TrajectoryData trajectory_data(const NetworkModel& model, const Trajectory& traj) {
  const auto& lay = model.layout();
  const auto count = static_cast<Eigen::Index>(traj.points.size());
  TrajectoryData d{Matrix(lay.dim(), count), Matrix(lay.dim(), count)};
  for (Eigen::Index k = 0; k < count; ++k) {
    const auto& pt = traj.points[static_cast<std::size_t>(k)];
    d.x.col(k) = lay.state(pt.v, pt.theta);
    d.y.col(k) = lay.output(pt.p, pt.q);
  }
  return d;
}

double load_bus_mape(const NetworkCase& c, const TrainedNetwork& net, const Matrix& x,
                     const Matrix& y, const SampleRange& range) {
  const auto& lay = c.model.layout();
  std::vector<int> rows;
  for (int i = 0; i < c.model.bus_count(); ++i)
    if (c.p_net(i) > 0.0 && lay.p_row(i) >= 0) rows.push_back(lay.p_row(i));
  if (rows.empty() || range.first < 1 || range.last > x.cols())
    throw ConfigError("no load buses or test range outside the data");
  const Matrix pred = predict_batch(net, x.middleCols(range.first - 1, range.size()));
  double acc = 0.0;
  int count = 0;
  for (int r : rows) {
    for (int k = 0; k < range.size(); ++k) {
      const double truth = y(r, range.first - 1 + k);
      if (truth == 0.0) continue;
      acc += std::abs(pred(r, k) - truth) / std::abs(truth);
      ++count;
    }
  }
  return count ? acc / count : 0.0;
}

std::vector<const CellResult*> ScenarioOutcome::select(const std::string& scene,
                                                       const std::string& window, Method m) const {
  std::vector<const CellResult*> out;
  for (const auto& c : cells)
    if (c.scene == scene && c.window == window && c.method == m) out.push_back(&c);
  return out;
}

ScenarioOutcome run_scenario(const ScenarioConfig& cfg) {
  return run_scenario(cfg, load_case(cfg.case_path));
}

ScenarioOutcome run_scenario(const ScenarioConfig& cfg, const NetworkCase& c) {
  if (cfg.estimators.empty()) throw ConfigError("config needs at least one estimator");
  ScenarioOutcome out;
  for (std::uint64_t seed : cfg.seeds) {
    std::map<std::string, Trajectory> trajectories;
    std::map<std::string, std::string> failed;
    std::map<std::string, NnOutcome> nets;
    for (std::size_t si = 0; si < cfg.scenes.size(); ++si) {
      const auto& scene = cfg.scenes[si];
      const auto profile = seeded_profile(scene, seed);
      const std::string key = profile_key(profile);
      if (!trajectories.count(key) && !failed.count(key)) {
        try {
          trajectories.emplace(key, generate_trajectory(c, profile, cfg.solve));
        } catch (const std::exception& e) {
          failed.emplace(key, error_kind(std::current_exception()) + ": " + e.what());
        }
      }
      std::optional<PreparedScene> ps;
      if (trajectories.count(key)) ps = prepare_with(c, cfg, si, seed, trajectories.at(key));

      for (std::size_t wi = 0; wi < scene.windows.size(); ++wi) {
        for (Method m : cfg.estimators) {
          CellResult cell;
          cell.scene = scene.name;
          cell.window = scene.windows[wi].name;
          cell.method = m;
          cell.seed = seed;
          if (!ps) {
            const auto& msg = failed.at(key);
            cell.error_kind = msg.substr(0, msg.find(':'));
            cell.error_message = msg.substr(msg.find(':') + 2);
            out.cells.push_back(std::move(cell));
            continue;
          }
          const auto& pw = ps->windows[wi];
          cell.benchmark = pw.benchmark;
          cell.benchmark_sample = pw.benchmark_sample;
          try {
            if (m == Method::NN) {
              if (!nets.count(key)) nets.emplace(key, train_on(c, cfg, ps->trajectory, seed));
              nn_cell(cell, c, cfg, *ps, pw, nets.at(key));
            } else {
              if (!pw.data) {
                cell.error_kind = pw.error_kind;
                cell.error_message = pw.error;
                out.cells.push_back(std::move(cell));
                continue;
              }
              if (scene.normalization) {
                const auto nw = normalize_window(*pw.data);
                cell.estimate = denormalize(estimate(m, nw, cfg.gls, cfg.kron), *nw.scaling_a,
                                            *nw.scaling_b);
              } else {
                cell.estimate = estimate(m, *pw.data, cfg.gls, cfg.kron);
              }
              cell.error = error_metrics(cell.estimate, pw.benchmark);
              cell.ok = true;
            }
          } catch (const std::exception& e) {
            cell.ok = false;
            cell.error_kind = error_kind(std::current_exception());
            cell.error_message = e.what();
          }
          out.cells.push_back(std::move(cell));
        }
      }
    }
  }
  return out;
}

namespace {

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json map_json(const std::vector<IndexEntry>& map) {
  json a = json::array();
  for (const auto& e : map) a.push_back(to_string(e));
  return a;
}

void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  out << content;
}

}  // namespace

std::string cell_name(const CellResult& cell) {
  return cell.scene + "__" + cell.window + "__seed" + std::to_string(cell.seed) + "__" +
         to_string(cell.method);
}

std::string cell_json(const CellResult& cell) {
  json j;
  j["scene"] = cell.scene;
  j["window"] = cell.window;
  j["estimator"] = to_string(cell.method);
  j["seed"] = cell.seed;
  j["status"] = cell.ok ? "ok" : "failed";
  if (!cell.ok) j["error"] = {{"kind", cell.error_kind}, {"message", cell.error_message}};
  j["benchmark_sample"] = cell.benchmark_sample;
  if (cell.ok) {
    j["rel_frobenius"] = cell.error.rel_frobenius;
    j["max_abs"] = cell.error.max_abs;
    j["row_map"] = map_json(cell.error.row_map);
    j["col_map"] = map_json(cell.error.col_map);
    json diag = json::object();
    for (const auto& [k, v] : cell.estimate.diagnostics) diag[k] = v;
    diag["rank_deficient"] = cell.estimate.rank_deficient;
    j["diagnostics"] = diag;
    if (!cell.estimate.residual_trace.empty()) j["gls_residual_trace"] = cell.estimate.residual_trace;
    j["estimate"] = matrix_json(cell.estimate.values);
    j["benchmark"] = matrix_json(cell.benchmark.values);
    j["entrywise_error"] = matrix_json(cell.error.entrywise);
  }
  return j.dump(1) + "\n";
}

std::string summary_json(const ScenarioConfig& cfg, const ScenarioOutcome& out) {
  json j;
  j["scenario"] = cfg.name;
  j["case"] = cfg.case_path;
  j["seeds"] = cfg.seeds;
  json cells = json::array();
  for (const auto& c : out.cells) {
    json e{{"scene", c.scene}, {"window", c.window}, {"estimator", to_string(c.method)},
           {"seed", c.seed}, {"status", c.ok ? "ok" : "failed"}};
    if (c.ok) e["rel_frobenius"] = c.error.rel_frobenius;
    else e["error_kind"] = c.error_kind;
    cells.push_back(std::move(e));
  }
  j["cells"] = std::move(cells);

  json agg = json::array();
  for (const auto& scene : cfg.scenes) {
    for (const auto& w : scene.windows) {
      for (Method m : cfg.estimators) {
        std::vector<double> errs;
        int failed_count = 0;
        for (const auto* c : out.select(scene.name, w.name, m)) {
          if (c->ok) errs.push_back(c->error.rel_frobenius);
          else ++failed_count;
        }
        const auto s = summarize(errs);
        agg.push_back({{"scene", scene.name}, {"window", w.name}, {"estimator", to_string(m)},
                       {"ok", s.count}, {"failed", failed_count}, {"mean_rel_frobenius", s.mean},
                       {"std_rel_frobenius", s.std}, {"min_rel_frobenius", s.min},
                       {"max_rel_frobenius", s.max}});
      }
    }
  }
  j["aggregate"] = std::move(agg);
  return j.dump(1) + "\n";
}

std::string summary_csv(const ScenarioOutcome& out) {
  std::ostringstream os;
  os << "scene,window,estimator,seed,status,rel_frobenius,max_abs,error_kind\n";
  for (const auto& c : out.cells) {
    os << c.scene << ',' << c.window << ',' << to_string(c.method) << ',' << c.seed << ','
       << (c.ok ? "ok" : "failed") << ',' << (c.ok ? format_double(c.error.rel_frobenius) : "")
       << ',' << (c.ok ? format_double(c.error.max_abs) : "") << ',' << c.error_kind << '\n';
  }
  return os.str();
}

void write_reports(const ScenarioConfig& cfg, const ScenarioOutcome& out, const std::string& dir) {
  const fs::path root(dir);
  for (const auto& c : out.cells) {
    const std::string name = cell_name(c);
    write_file(root / "cells" / (name + ".json"), cell_json(c));
    if (!c.ok) continue;
    write_file(root / "cells" / (name + "_estimate.csv"),
               matrix_to_csv(c.estimate.values, c.error.row_map, c.error.col_map));
    write_file(root / "cells" / (name + "_error.csv"),
               matrix_to_csv(c.error.entrywise, c.error.row_map, c.error.col_map));
    write_file(root / "benchmarks" /
                   (c.scene + "__" + c.window + "__seed" + std::to_string(c.seed) + ".csv"),
               jacobian_to_csv(c.benchmark));
  }
  write_file(root / "summary.json", summary_json(cfg, out));
  write_file(root / "summary.csv", summary_csv(out));
}

}  // namespace jacoest
