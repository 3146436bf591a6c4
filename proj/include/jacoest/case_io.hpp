#pragma once

#include <string>

#include "jacoest/network.hpp"

namespace jacoest {

/// A network plus its base-case operating targets, all in per unit.
struct NetworkCase {
  std::string name;
  NetworkModel model;
  Vector p_net;  // net consumption, load minus generation
  Vector q_net;
  Vector v_set;  // used at slack and PV buses
};

/// Parses a case document. Loads/generation are in MW/MVAr on the case base,
/// shunts in per unit, branches either {r, x} (admittance 1/(r+jx)) or {g, b}.
NetworkCase parse_case(const std::string& json_text, const std::string& name = "case");
NetworkCase load_case(const std::string& path);

/// Resolves a bare case name such as "ieee9" against the bundled data dir.
std::string resolve_case_path(const std::string& name_or_path);

}  // namespace jacoest
