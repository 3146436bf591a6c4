// Command-line front end: solve, jacobian, simulate, estimate, nn-train, report.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "jacoest/errors.hpp"
#include "jacoest/harness.hpp"
#include "jacoest/linalg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace jacoest;

namespace {

struct Common {
  std::string format = "json";
  std::string out;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void add_common(CLI::App* cmd, Common& c, bool with_seed) {
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", c.out, "Output directory");
  if (with_seed) {
    cmd->add_option("--seed", c.seed, "Run only this seed")->each([&](const std::string&) {
      c.seed_given = true;
    });
  }
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  out << text;
}

// Prints to stdout, or to <out>/<name> when --out is set.
void emit(const Common& c, const std::string& name, const std::string& text) {
  if (c.out.empty()) std::cout << text;
  else write_text(fs::path(c.out) / name, text);
}

json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

SolveResult solve_base(const NetworkCase& nc) {
  return solve_powerflow(nc.model, {nc.p_net, nc.q_net, nc.v_set});
}

int cmd_solve(const std::string& case_path, const Common& c) {
  const auto nc = load_case(case_path);
  const auto r = solve_base(nc);
  const double deg = 180.0 / std::numbers::pi;
  if (c.format == "json") {
    json j;
    j["case"] = nc.name;
    j["iterations"] = r.iterations;
    j["final_mismatch"] = r.final_mismatch;
    j["vm"] = vec_json(r.point.v);
    j["va_deg"] = vec_json(r.point.theta * deg);
    j["p"] = vec_json(r.point.p);
    j["q"] = vec_json(r.point.q);
    emit(c, "solution.json", j.dump(1) + "\n");
  } else {
    std::ostringstream os;
    os << "# iterations: " << r.iterations << ", mismatch: " << format_double(r.final_mismatch)
       << '\n'
       << "bus,role,vm,va_deg,p,q\n";
    for (int i = 0; i < nc.model.bus_count(); ++i)
      os << i + 1 << ',' << to_string(nc.model.role(i)) << ',' << format_double(r.point.v(i)) << ','
         << format_double(r.point.theta(i) * deg) << ',' << format_double(r.point.p(i)) << ','
         << format_double(r.point.q(i)) << '\n';
    emit(c, "solution.csv", os.str());
  }
  return 0;
}

int cmd_jacobian(const std::string& case_path, bool fd, double step, const Common& c) {
  const auto nc = load_case(case_path);
  const auto r = solve_base(nc);
  const auto analytic = analytic_jacobian(nc.model, r.point);
  const auto j = fd ? finite_difference_jacobian(nc.model, r.point, step) : analytic;
  if (c.format == "csv") {
    emit(c, "jacobian.csv", jacobian_to_csv(j));
    return 0;
  }
  json doc;
  doc["case"] = nc.name;
  doc["method"] = fd ? "finite_difference" : "analytic";
  if (fd) {
    doc["step"] = step;
    doc["rel_frobenius_vs_analytic"] = relative_frobenius(analytic.values, j.values);
  }
  json rows = json::array(), cols = json::array(), values = json::array();
  for (const auto& e : j.row_map) rows.push_back(to_string(e));
  for (const auto& e : j.col_map) cols.push_back(to_string(e));
  for (int i = 0; i < j.dim(); ++i) {
    const Vector row = j.values.row(i);
    values.push_back(vec_json(row));
  }
  doc["dim"] = j.dim();
  doc["row_map"] = rows;
  doc["col_map"] = cols;
  doc["values"] = values;
  emit(c, "jacobian.json", doc.dump(1) + "\n");
  return 0;
}

ScenarioConfig config_for(const std::string& path, const Common& c) {
  auto cfg = load_scenario_config(path);
  if (c.seed_given) cfg.seeds = {c.seed};
  return cfg;
}

std::string series_csv(const Trajectory& traj, const NetworkModel& model) {
  const auto& lay = model.layout();
  std::ostringstream os;
  os << "sample";
  for (const auto& e : lay.col_map()) os << ',' << to_string(e);
  for (const auto& e : lay.row_map()) os << ',' << to_string(e);
  os << '\n';
  for (std::size_t k = 0; k < traj.points.size(); ++k) {
    const auto& pt = traj.points[k];
    os << k + 1;
    const Vector x = lay.state(pt.v, pt.theta), y = lay.output(pt.p, pt.q);
    for (Eigen::Index i = 0; i < x.size(); ++i) os << ',' << format_double(x(i));
    for (Eigen::Index i = 0; i < y.size(); ++i) os << ',' << format_double(y(i));
    os << '\n';
  }
  return os.str();
}

int cmd_simulate(const std::string& config, const Common& c) {
  const auto cfg = config_for(config, c);
  const auto nc = load_case(cfg.case_path);
  json summary = json::array();
  for (std::uint64_t seed : cfg.seeds) {
    for (std::size_t si = 0; si < cfg.scenes.size(); ++si) {
      const auto ps = prepare_scene(nc, cfg, si, seed);
      const auto& scene = cfg.scenes[si];
      const std::string stem = scene.name + "__seed" + std::to_string(seed);
      json entry{{"scene", scene.name}, {"seed", seed}, {"samples", ps.trajectory.points.size()},
                 {"solver_iterations", ps.trajectory.total_iterations}};
      json wins = json::array();
      for (const auto& pw : ps.windows) {
        json w{{"name", pw.window.name}, {"points", pw.window.range.count},
               {"benchmark_sample", pw.benchmark_sample}};
        if (pw.data) {
          w["t"] = pw.data->t();
          if (!c.out.empty()) {
            const std::string ws = stem + "__" + pw.window.name;
            write_text(fs::path(c.out) / (ws + "_A.csv"),
                       window_matrix_csv(pw.data->a, pw.data->a_map, pw.series.samples));
            write_text(fs::path(c.out) / (ws + "_B.csv"),
                       window_matrix_csv(pw.data->b, pw.data->b_map, pw.series.samples));
            write_text(fs::path(c.out) / (ws + "_J0.csv"), jacobian_to_csv(pw.benchmark));
          }
        } else {
          w["error"] = pw.error;
        }
        wins.push_back(std::move(w));
      }
      entry["windows"] = std::move(wins);
      if (!c.out.empty())
        write_text(fs::path(c.out) / (stem + "_trajectory.csv"), series_csv(ps.trajectory, nc.model));
      summary.push_back(std::move(entry));
    }
  }
  const std::string text = summary.dump(1) + "\n";
  if (!c.out.empty()) write_text(fs::path(c.out) / "simulate.json", text);
  std::cout << text;
  return 0;
}

std::string aggregate_csv(const json& summary) {
  std::ostringstream os;
  os << "scene,window,estimator,ok,failed,mean_rel_frobenius,std_rel_frobenius\n";
  for (const auto& a : summary.at("aggregate"))
    os << a.at("scene").get<std::string>() << ',' << a.at("window").get<std::string>() << ','
       << a.at("estimator").get<std::string>() << ',' << a.at("ok").get<int>() << ','
       << a.at("failed").get<int>() << ',' << format_double(a.at("mean_rel_frobenius").get<double>())
       << ',' << format_double(a.at("std_rel_frobenius").get<double>()) << '\n';
  return os.str();
}

int cmd_estimate(const std::string& config, const Common& c) {
  const auto cfg = config_for(config, c);
  const auto outcome = run_scenario(cfg);
  const std::string dir = !c.out.empty() ? c.out : cfg.output_dir;
  if (!dir.empty()) write_reports(cfg, outcome, dir);
  const std::string summary = summary_json(cfg, outcome);
  if (c.format == "json") std::cout << summary;
  else std::cout << aggregate_csv(json::parse(summary));
  return 0;
}

int cmd_nn_train(const std::string& config, const Common& c) {
  const auto cfg = config_for(config, c);
  const auto nc = load_case(cfg.case_path);
  json results = json::array();
  for (std::uint64_t seed : cfg.seeds) {
    auto profile = cfg.scenes.front().profile;
    profile.seed = seed;
    const auto traj = generate_trajectory(nc, profile, cfg.solve);
    const auto [x, y] = trajectory_data(nc.model, traj);
    TrainSettings ts = cfg.nn.train;
    ts.seed = seed;
    const auto res = train_network(x, y, cfg.nn.arch, ts);
    const auto& te = ts.test_range;
    const int mid = te.first + te.size() / 2;
    const auto j0 = analytic_jacobian(nc.model, traj.points[static_cast<std::size_t>(mid - 1)]);
    const Matrix jnn = network_jacobian(res.net, x.col(mid - 1));
    json r{{"seed", seed},
           {"train_final_loss", res.train_loss.back()},
           {"test_mape_load_p", load_bus_mape(nc, res.net, x, y, te)},
           {"jacobian_sample", mid},
           {"jacobian_rel_frobenius", relative_frobenius(jnn, j0.values)}};
    if (!res.test_loss.empty()) r["test_final_loss"] = res.test_loss.back().second;
    if (!c.out.empty()) {
      const std::string stem = "nn_seed" + std::to_string(seed);
      write_text(fs::path(c.out) / (stem + ".json"), network_to_json(res.net));
      std::ostringstream curve;
      curve << "epoch,train_loss\n";
      for (std::size_t e = 0; e < res.train_loss.size(); ++e)
        curve << e + 1 << ',' << format_double(res.train_loss[e]) << '\n';
      write_text(fs::path(c.out) / (stem + "_train_loss.csv"), curve.str());
      std::ostringstream tcurve;
      tcurve << "epoch,test_loss\n";
      for (const auto& [e, l] : res.test_loss) tcurve << e << ',' << format_double(l) << '\n';
      write_text(fs::path(c.out) / (stem + "_test_loss.csv"), tcurve.str());
    }
    results.push_back(std::move(r));
  }
  std::cout << results.dump(1) << '\n';
  return 0;
}

int cmd_report(const std::string& dir, const Common& c) {
  const fs::path p = fs::path(dir) / "summary.json";
  std::ifstream in(p);
  if (!in) throw ConfigError("no summary.json in '" + dir + "'");
  json summary;
  try {
    summary = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("summary.json: ") + e.what());
  }
  if (c.format == "json") std::cout << summary.at("aggregate").dump(1) << '\n';
  else std::cout << aggregate_csv(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power-flow Jacobian: analytic benchmark and data-driven estimates"};
  app.require_subcommand(1);

  Common common;
  std::string target;
  bool fd = false;
  double step = 1e-6;

  auto* solve = app.add_subcommand("solve", "Solve the base-case power flow");
  solve->add_option("case", target, "Case file or bundled case name")->required();
  add_common(solve, common, false);

  auto* jac = app.add_subcommand("jacobian", "Jacobian at the solved base case");
  jac->add_option("case", target, "Case file or bundled case name")->required();
  jac->add_flag("--fd", fd, "Use central finite differences");
  jac->add_option("--step", step, "Finite-difference step");
  add_common(jac, common, false);

  auto* sim = app.add_subcommand("simulate", "Generate trajectories and measurement windows");
  sim->add_option("config", target, "Scenario config")->required();
  add_common(sim, common, true);

  auto* est = app.add_subcommand("estimate", "Run the estimator grid of a scenario");
  est->add_option("config", target, "Scenario config")->required();
  add_common(est, common, true);

  auto* nn = app.add_subcommand("nn-train", "Train the neural-network estimator");
  nn->add_option("config", target, "Scenario config")->required();
  add_common(nn, common, true);

  auto* rep = app.add_subcommand("report", "Summarize a report directory");
  rep->add_option("dir", target, "Directory written by estimate")->required();
  add_common(rep, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve) return cmd_solve(target, common);
    if (*jac) return cmd_jacobian(target, fd, step, common);
    if (*sim) return cmd_simulate(target, common);
    if (*est) return cmd_estimate(target, common);
    if (*nn) return cmd_nn_train(target, common);
    if (*rep) return cmd_report(target, common);
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
