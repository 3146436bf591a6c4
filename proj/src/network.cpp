#include "jacoest/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jacoest/errors.hpp"

namespace jacoest {

std::string to_string(BusRole role) {
  switch (role) {
    case BusRole::Slack: return "slack";
    case BusRole::PV: return "pv";
    case BusRole::PQ: return "pq";
  }
  return "?";
}

BusRole parse_bus_role(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "slack" || t == "ref" || t == "swing") return BusRole::Slack;
  if (t == "pv") return BusRole::PV;
  if (t == "pq") return BusRole::PQ;
  throw ConfigError("unknown bus role '" + text + "'");
}

std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::P: return "P";
    case Quantity::Q: return "Q";
    case Quantity::Theta: return "theta";
    case Quantity::V: return "V";
  }
  return "?";
}

std::string to_string(const IndexEntry& e) { return to_string(e.quantity) + std::to_string(e.bus); }

std::string to_string(const std::vector<IndexEntry>& map) {
  std::ostringstream os;
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (i) os << ',';
    os << to_string(map[i]);
  }
  return os.str();
}

StateLayout::StateLayout(std::vector<int> non_slack, std::vector<int> pq)
    : non_slack_(std::move(non_slack)), pq_(std::move(pq)) {}

std::vector<IndexEntry> StateLayout::row_map() const {
  std::vector<IndexEntry> out;
  for (int i : non_slack_) out.push_back({Quantity::P, i + 1});
  for (int i : pq_) out.push_back({Quantity::Q, i + 1});
  return out;
}

std::vector<IndexEntry> StateLayout::col_map() const {
  std::vector<IndexEntry> out;
  for (int i : non_slack_) out.push_back({Quantity::Theta, i + 1});
  for (int i : pq_) out.push_back({Quantity::V, i + 1});
  return out;
}

Vector StateLayout::state(const Vector& v, const Vector& theta) const {
  Vector x(dim());
  int r = 0;
  for (int i : non_slack_) x(r++) = theta(i);
  for (int i : pq_) x(r++) = v(i);
  return x;
}

Vector StateLayout::output(const Vector& p, const Vector& q) const {
  Vector y(dim());
  int r = 0;
  for (int i : non_slack_) y(r++) = p(i);
  for (int i : pq_) y(r++) = q(i);
  return y;
}

void StateLayout::apply_state(const Vector& x, Vector& v, Vector& theta) const {
  if (x.size() != dim()) throw DimensionError("state vector length does not match layout");
  int r = 0;
  for (int i : non_slack_) theta(i) = x(r++);
  for (int i : pq_) v(i) = x(r++);
}

int StateLayout::p_row(int bus_index) const {
  auto it = std::find(non_slack_.begin(), non_slack_.end(), bus_index);
  return it == non_slack_.end() ? -1 : static_cast<int>(it - non_slack_.begin());
}

int StateLayout::q_row(int bus_index) const {
  auto it = std::find(pq_.begin(), pq_.end(), bus_index);
  return it == pq_.end() ? -1 : angle_count() + static_cast<int>(it - pq_.begin());
}

int NetworkModel::pv_count() const {
  return static_cast<int>(std::count_if(buses_.begin(), buses_.end(),
                                        [](const BusSpec& b) { return b.role == BusRole::PV; }));
}

bool NetworkModel::adjacent(int i, int j) const {
  return i != j && admittance_(i, j) != Complex(0.0, 0.0);
}

NetworkModel build_network(std::vector<BusSpec> buses, std::vector<BranchSpec> branches,
                           double base_mva) {
  if (buses.empty()) throw ConfigError("network has no buses");
  if (!(base_mva > 0.0)) throw ConfigError("base_mva must be positive");
  std::sort(buses.begin(), buses.end(),
            [](const BusSpec& a, const BusSpec& b) { return a.id < b.id; });
  const int n = static_cast<int>(buses.size());
  for (int i = 0; i < n; ++i) {
    if (i > 0 && buses[i].id == buses[i - 1].id)
      throw ConfigError("duplicate bus id " + std::to_string(buses[i].id));
    if (buses[i].id != i + 1)
      throw ConfigError("bus ids must form the range 1.." + std::to_string(n));
  }

  NetworkModel m;
  m.base_mva_ = base_mva;
  m.shunt_g_ = Vector::Zero(n);
  m.shunt_b_ = Vector::Zero(n);
  int slack_count = 0;
  std::vector<int> non_slack, pq;
  for (int i = 0; i < n; ++i) {
    const auto& b = buses[i];
    m.shunt_g_(i) = b.shunt_g;
    m.shunt_b_(i) = b.shunt_b;
    if (b.role == BusRole::Slack) {
      ++slack_count;
      m.slack_ = i;
    } else {
      non_slack.push_back(i);
      if (b.role == BusRole::PQ) pq.push_back(i);
    }
  }
  if (slack_count != 1)
    throw ConfigError("network needs exactly one slack bus, found " + std::to_string(slack_count));

  m.admittance_ = ComplexMatrix::Zero(n, n);
  for (const auto& br : branches) {
    if (br.from < 1 || br.from > n || br.to < 1 || br.to > n)
      throw ConfigError("branch " + std::to_string(br.from) + "-" + std::to_string(br.to) +
                        " references a missing bus");
    if (br.from == br.to) throw ConfigError("branch connects bus " + std::to_string(br.from) +
                                            " to itself");
    const int i = br.from - 1, k = br.to - 1;
    const Complex y(br.g, br.b);
    m.admittance_(i, k) += y;
    m.admittance_(k, i) += y;
  }
  for (int i = 0; i < n; ++i) {
    Complex s(0.0, 0.0);
    for (int k = 0; k < n; ++k)
      if (k != i) s += m.admittance_(i, k);
    m.admittance_(i, i) = -s;
  }

  m.buses_ = std::move(buses);
  m.branches_ = std::move(branches);
  m.layout_ = StateLayout(std::move(non_slack), std::move(pq));
  return m;
}

Injections compute_injections(const NetworkModel& model, const Vector& v, const Vector& theta) {
  const int n = model.bus_count();
  if (v.size() != n || theta.size() != n)
    throw DimensionError("voltage vectors must have one entry per bus");
  const auto& y = model.admittance();
  Injections out{Vector::Zero(n), Vector::Zero(n)};
  for (int i = 0; i < n; ++i) {
    double p = 0.0, q = 0.0, gsum = 0.0, bsum = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      const double g = y(i, k).real(), b = y(i, k).imag();
      if (g == 0.0 && b == 0.0) continue;
      const double t = theta(i) - theta(k);
      const double c = std::cos(t), s = std::sin(t);
      p += v(k) * (g * c + b * s);
      q += v(k) * (g * s - b * c);
      gsum += g;
      bsum += b;
    }
    const double vi2 = v(i) * v(i);
    out.p(i) = v(i) * p - vi2 * gsum - vi2 * model.shunt_g()(i);
    out.q(i) = v(i) * q + vi2 * bsum + vi2 * model.shunt_b()(i);
  }
  return out;
}

OperatingPoint make_operating_point(const NetworkModel& model, const Vector& v,
                                    const Vector& theta) {
  auto inj = compute_injections(model, v, theta);
  return {v, theta, std::move(inj.p), std::move(inj.q), false};
}

OperatingPoint flat_point(const NetworkModel& model) {
  const int n = model.bus_count();
  return make_operating_point(model, Vector::Ones(n), Vector::Zero(n));
}

}  // namespace jacoest
