#include "jacoest/case_io.hpp"

#include <complex>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "jacoest/errors.hpp"

namespace jacoest {

namespace {

using nlohmann::json;

double number_or(const json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

int required_int(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer())
    throw ConfigError(std::string("missing integer field '") + key + "'");
  return it->get<int>();
}

}  // namespace

NetworkCase parse_case(const std::string& json_text, const std::string& name) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("case '" + name + "': " + e.what());
  }
  if (!doc.is_object() || !doc.contains("buses") || !doc["buses"].is_array())
    throw ConfigError("case '" + name + "' needs a 'buses' array");
  const double base = number_or(doc, "base_mva", 100.0);

  std::vector<BusSpec> buses;
  struct Target { double p, q, v; };
  std::vector<std::pair<int, Target>> targets;
  for (const auto& jb : doc["buses"]) {
    BusSpec b;
    b.id = required_int(jb, "id");
    if (!jb.contains("role") || !jb["role"].is_string())
      throw ConfigError("bus " + std::to_string(b.id) + " has no role");
    b.role = parse_bus_role(jb["role"].get<std::string>());
    b.shunt_g = number_or(jb, "shunt_g", 0.0);
    b.shunt_b = number_or(jb, "shunt_b", 0.0);
    const double p = (number_or(jb, "pd", 0.0) - number_or(jb, "pg", 0.0)) / base;
    const double q = (number_or(jb, "qd", 0.0) - number_or(jb, "qg", 0.0)) / base;
    const double v = number_or(jb, "vm", 1.0);
    if (!(v > 0.0)) throw ConfigError("bus " + std::to_string(b.id) + ": vm must be positive");
    buses.push_back(b);
    targets.push_back({b.id, {p, q, v}});
  }

  std::vector<BranchSpec> branches;
  if (doc.contains("branches")) {
    if (!doc["branches"].is_array()) throw ConfigError("'branches' must be an array");
    for (const auto& jl : doc["branches"]) {
      BranchSpec br;
      br.from = required_int(jl, "from");
      br.to = required_int(jl, "to");
      if (jl.contains("r") || jl.contains("x")) {
        const std::complex<double> z(number_or(jl, "r", 0.0), number_or(jl, "x", 0.0));
        if (std::abs(z) == 0.0)
          throw ConfigError("branch " + std::to_string(br.from) + "-" + std::to_string(br.to) +
                            " has zero impedance");
        const auto y = 1.0 / z;
        br.g = y.real();
        br.b = y.imag();
      } else {
        br.g = number_or(jl, "g", 0.0);
        br.b = number_or(jl, "b", 0.0);
      }
      branches.push_back(br);
    }
  }

  NetworkCase c;
  c.name = doc.value("name", name);
  c.model = build_network(std::move(buses), std::move(branches), base);
  const int n = c.model.bus_count();
  c.p_net = Vector::Zero(n);
  c.q_net = Vector::Zero(n);
  c.v_set = Vector::Ones(n);
  for (const auto& [id, t] : targets) {
    c.p_net(id - 1) = t.p;
    c.q_net(id - 1) = t.q;
    c.v_set(id - 1) = t.v;
  }
  return c;
}

NetworkCase load_case(const std::string& path) {
  const std::string resolved = resolve_case_path(path);
  std::ifstream in(resolved);
  if (!in) throw ConfigError("cannot open case file '" + resolved + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_case(ss.str(), std::filesystem::path(resolved).stem().string());
}

std::string resolve_case_path(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  if (fs::exists(name_or_path)) return name_or_path;
  for (const fs::path& candidate : {fs::path(JACOEST_DATA_DIR) / name_or_path,
                                   fs::path(JACOEST_DATA_DIR) / (name_or_path + ".json")}) {
    if (fs::exists(candidate)) return candidate.string();
  }
  return name_or_path;
}

}  // namespace jacoest
