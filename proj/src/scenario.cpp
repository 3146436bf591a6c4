#include "jacoest/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jacoest/errors.hpp"

namespace jacoest {

double DailyShape::at_hour(double hour) const {
  double v = base;
  for (const auto& b : bumps) {
    const double d = (hour - b.hour) / b.width;
    v += b.amplitude * std::exp(-0.5 * d * d);
  }
  return v;
}

DailyShape DailyShape::double_peak() { return {0.55, {{0.30, 10.0, 2.0}, {0.45, 19.0, 2.0}}}; }

namespace {

struct BaseConsumption {
  Vector p;
  Vector q;
  Vector magnitude;
};

BaseConsumption base_consumption(const NetworkCase& c, const DailyProfileConfig& cfg) {
  const int n = c.model.bus_count();
  BaseConsumption out{c.p_net, c.q_net, Vector::Zero(n)};
  for (const auto& bl : cfg.base_loads) {
    if (bl.bus < 1 || bl.bus > n)
      throw ConfigError("base load references missing bus " + std::to_string(bl.bus));
    out.p(bl.bus - 1) = bl.p_mw / c.model.base_mva();
    out.q(bl.bus - 1) = bl.q_mvar / c.model.base_mva();
  }
  for (int i = 0; i < n; ++i) out.magnitude(i) = std::hypot(out.p(i), out.q(i));
  return out;
}

void check_profile(const DailyProfileConfig& cfg) {
  if (cfg.samples_per_day < 2) throw ConfigError("samples_per_day must be at least 2");
  if (cfg.sample_count < 0) throw ConfigError("sample_count must be nonnegative");
  if (!(cfg.fluctuation_sigma >= 0.0)) throw ConfigError("fluctuation_sigma must be nonnegative");
  for (const auto& b : cfg.shape.bumps)
    if (!(b.width > 0.0)) throw ConfigError("profile bump width must be positive");
}

PowerFlowTargets targets_from(const NetworkCase& c, const BaseConsumption& base,
                              const DailyProfileConfig& cfg, int sample, Rng& rng) {
  const int n = c.model.bus_count();
  const double hour = 24.0 * (sample - 1) / cfg.samples_per_day;
  const double level = cfg.shape.at_hour(hour);
  PowerFlowTargets t{Vector::Zero(n), Vector::Zero(n), c.v_set};
  for (int i = 0; i < n; ++i) {
    // Both draws are taken for every bus so the stream layout is role-independent.
    const double ep = rng.normal();
    const double eq = rng.normal();
    const double s = cfg.fluctuation_sigma * base.magnitude(i);
    t.p(i) = level * base.p(i) + s * ep;
    t.q(i) = level * base.q(i) + s * eq;
  }
  return t;
}

}  // namespace

PowerFlowTargets sample_targets(const NetworkCase& c, const DailyProfileConfig& cfg, int sample,
                                Rng& rng) {
  check_profile(cfg);
  return targets_from(c, base_consumption(c, cfg), cfg, sample, rng);
}

Trajectory generate_trajectory(const NetworkCase& c, const DailyProfileConfig& cfg,
                               const SolveSettings& settings) {
  check_profile(cfg);
  const auto base = base_consumption(c, cfg);
  Rng rng(mix_seed(cfg.seed, 0x70726f66));
  Trajectory traj;
  traj.points.reserve(static_cast<std::size_t>(cfg.count()));
  SolveSettings s = settings;
  for (int k = 1; k <= cfg.count(); ++k) {
    const auto targets = targets_from(c, base, cfg, k, rng);
    const OperatingPoint* warm = traj.points.empty() ? nullptr : &traj.points.back();
    s.flat_start = warm == nullptr;
    try {
      auto r = solve_powerflow(c.model, targets, s, warm);
      traj.total_iterations += r.iterations;
      traj.points.push_back(std::move(r.point));
    } catch (const NonConvergence& e) {
      throw NonConvergence(e.iterations(), e.mismatch(), "sample " + std::to_string(k));
    } catch (const SingularJacobian& e) {
      throw SingularJacobian(e.iteration(), "sample " + std::to_string(k));
    }
  }
  return traj;
}

SampledSeries sample_series(const Trajectory& traj, const NetworkModel& model,
                            const WindowRange& range) {
  const int total = static_cast<int>(traj.points.size());
  if (range.count < 1 || range.stride < 1 || range.start < 1 || range.last() > total)
    throw ConfigError("window [start " + std::to_string(range.start) + ", count " +
                      std::to_string(range.count) + ", stride " + std::to_string(range.stride) +
                      "] does not fit a trajectory of " + std::to_string(total) + " samples");
  const auto& lay = model.layout();
  SampledSeries s;
  s.x.resize(lay.dim(), range.count);
  s.y.resize(lay.dim(), range.count);
  s.x_bias = Vector::Zero(lay.dim());
  s.y_bias = Vector::Zero(lay.dim());
  for (int k = 0; k < range.count; ++k) {
    const int sample = range.start + k * range.stride;
    const auto& pt = traj.points[static_cast<std::size_t>(sample - 1)];
    s.x.col(k) = lay.state(pt.v, pt.theta);
    s.y.col(k) = lay.output(pt.p, pt.q);
    s.samples.push_back(sample);
  }
  s.x_map = lay.col_map();
  s.y_map = lay.row_map();
  return s;
}

MeasurementWindow window_from_series(const SampledSeries& s) {
  const int n = static_cast<int>(s.x.rows());
  const int t = static_cast<int>(s.x.cols()) - 1;
  if (s.y.rows() != n || s.y.cols() != s.x.cols())
    throw DimensionError("state and output series must have the same shape");
  if (t <= n) throw WindowTooShort(std::max(t, 0), n);
  MeasurementWindow w;
  // Differences are taken on the unbiased values; a constant row bias
  // contributes (c - c) = 0 exactly.
  w.a = s.x.rightCols(t) - s.x.leftCols(t);
  w.b = s.y.rightCols(t) - s.y.leftCols(t);
  w.a_map = s.x_map;
  w.b_map = s.y_map;
  return w;
}

MeasurementWindow build_window(const Trajectory& traj, const NetworkModel& model,
                               const WindowRange& range) {
  return window_from_series(sample_series(traj, model, range));
}

std::string to_string(NoiseTarget t) {
  switch (t) {
    case NoiseTarget::OutputsY: return "outputs_y";
    case NoiseTarget::StatesX: return "states_x";
    case NoiseTarget::BothWhite: return "both_white";
  }
  return "?";
}

NoiseTarget parse_noise_target(const std::string& text) {
  if (text == "outputs_y") return NoiseTarget::OutputsY;
  if (text == "states_x") return NoiseTarget::StatesX;
  if (text == "both_white") return NoiseTarget::BothWhite;
  throw ConfigError("unknown noise target '" + text + "'");
}

namespace {

void add_noise(Matrix& m, Vector& bias, int rows, double alpha1, double alpha2, Rng& rng) {
  if (alpha1 != 0.0)
    for (Eigen::Index k = 0; k < m.cols(); ++k)
      for (int r = 0; r < rows; ++r) m(r, k) += alpha1 * rng.normal();
  bias.head(rows).array() += alpha2;
}

}  // namespace

NoiseSpec to_per_unit(NoiseSpec spec, double base_mva) {
  for (auto& loc : spec.localized) {
    if (!loc.in_mva) continue;
    loc.sigma_p /= base_mva;
    loc.sigma_q /= base_mva;
    loc.in_mva = false;
  }
  return spec;
}

SampledSeries inject_noise(const SampledSeries& s, const NoiseSpec& spec, std::uint64_t seed) {
  if (!(spec.alpha1 >= 0.0)) throw ConfigError("alpha1 must be nonnegative");
  SampledSeries out = s;
  const int n = static_cast<int>(s.x.rows());
  const int points = static_cast<int>(s.x.cols());
  if (out.x_bias.size() != n) out.x_bias = Vector::Zero(n);
  if (out.y_bias.size() != n) out.y_bias = Vector::Zero(n);

  const bool on_x = spec.target != NoiseTarget::OutputsY;
  const bool on_y = spec.target != NoiseTarget::StatesX;
  if (on_x) {
    int rows = n;
    if (spec.target == NoiseTarget::StatesX && spec.states_angles_only) {
      rows = static_cast<int>(std::count_if(s.x_map.begin(), s.x_map.end(), [](const IndexEntry& e) {
        return e.quantity == Quantity::Theta;
      }));
    }
    Rng rng(mix_seed(seed, 1));
    add_noise(out.x, out.x_bias, rows, spec.alpha1, spec.alpha2, rng);
  }
  if (on_y) {
    Rng rng(mix_seed(seed, 2));
    add_noise(out.y, out.y_bias, n, spec.alpha1, spec.alpha2, rng);
  }

  for (std::size_t li = 0; li < spec.localized.size(); ++li) {
    const auto& loc = spec.localized[li];
    if (loc.first < 1 || loc.last > points || loc.first > loc.last)
      throw ConfigError("localized noise range " + std::to_string(loc.first) + ".." +
                        std::to_string(loc.last) + " is outside the window of " +
                        std::to_string(points) + " points");
    if (loc.in_mva) throw ConfigError("localized noise is still in MVA; convert it to per unit");
    if (!(loc.sigma_p >= 0.0) || !(loc.sigma_q >= 0.0))
      throw ConfigError("localized noise sigma must be nonnegative");
    Rng rng(mix_seed(seed, 16 + li));
    for (const auto& [quantity, sigma] :
         {std::pair{Quantity::P, loc.sigma_p}, std::pair{Quantity::Q, loc.sigma_q}}) {
      const auto it = std::find(s.y_map.begin(), s.y_map.end(), IndexEntry{quantity, loc.bus});
      if (it == s.y_map.end() || sigma == 0.0) continue;
      const auto row = it - s.y_map.begin();
      for (int k = loc.first - 1; k < loc.last; ++k) out.y(row, k) += sigma * rng.normal();
    }
  }
  return out;
}

MeasurementWindow scale_window(const MeasurementWindow& w, const Vector& lambda_a,
                               const Vector& lambda_b) {
  if (lambda_a.size() != w.a.rows() || lambda_b.size() != w.b.rows())
    throw DimensionError("scaling diagonals do not match the window");
  MeasurementWindow out = w;
  out.a = lambda_a.asDiagonal() * w.a;
  out.b = lambda_b.asDiagonal() * w.b;
  out.scaling_a = lambda_a;
  out.scaling_b = lambda_b;
  return out;
}

namespace {

Vector inverse_row_std(const Matrix& m) {
  Vector lam = Vector::Ones(m.rows());
  if (m.cols() == 0) return lam;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double mean = m.row(r).mean();
    const double var = (m.row(r).array() - mean).square().sum() / static_cast<double>(m.cols());
    if (var > 0.0) lam(r) = 1.0 / std::sqrt(var);
  }
  return lam;
}

}  // namespace

MeasurementWindow normalize_window(const MeasurementWindow& w) {
  return scale_window(w, inverse_row_std(w.a), inverse_row_std(w.b));
}

JacobianMatrix benchmark_at(const Trajectory& traj, const NetworkModel& model, int sample) {
  if (sample < 1 || sample > static_cast<int>(traj.points.size()))
    throw ConfigError("benchmark sample " + std::to_string(sample) + " is outside the trajectory");
  return analytic_jacobian(model, traj.points[static_cast<std::size_t>(sample - 1)]);
}

JacobianMatrix benchmark_mean(const Trajectory& traj, const NetworkModel& model,
                              const WindowRange& range) {
  JacobianMatrix acc = benchmark_at(traj, model, range.start);
  for (int k = 1; k < range.count; ++k)
    acc.values += benchmark_at(traj, model, range.start + k * range.stride).values;
  acc.values /= static_cast<double>(range.count);
  return acc;
}

std::string window_matrix_csv(const Matrix& m, const std::vector<IndexEntry>& rows,
                              const std::vector<int>& samples) {
  std::ostringstream os;
  os << "# rows: " << to_string(rows) << '\n';
  os << "row";
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    os << ',';
    if (static_cast<std::size_t>(c + 1) < samples.size())
      os << 'd' << samples[static_cast<std::size_t>(c + 1)];
    else
      os << c;
  }
  os << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    os << (static_cast<std::size_t>(r) < rows.size() ? to_string(rows[static_cast<std::size_t>(r)])
                                                      : std::to_string(r));
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << ',' << format_double(m(r, c));
    os << '\n';
  }
  return os.str();
}

}  // namespace jacoest
