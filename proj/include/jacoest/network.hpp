#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace jacoest {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

enum class BusRole { Slack, PV, PQ };

std::string to_string(BusRole role);
BusRole parse_bus_role(const std::string& text);

/// A bus with its node-to-ground admittance g + jb in per unit.
struct BusSpec {
  int id = 0;  // 1-based
  BusRole role = BusRole::PQ;
  double shunt_g = 0.0;
  double shunt_b = 0.0;
};

/// Series admittance G + jB between two buses, per unit.
struct BranchSpec {
  int from = 0;
  int to = 0;
  double g = 0.0;
  double b = 0.0;
};

/// One row or column label of a Jacobian / measurement window.
enum class Quantity { P, Q, Theta, V };

struct IndexEntry {
  Quantity quantity = Quantity::P;
  int bus = 0;  // 1-based bus id

  friend bool operator==(const IndexEntry&, const IndexEntry&) = default;
};

std::string to_string(Quantity q);
std::string to_string(const IndexEntry& e);
std::string to_string(const std::vector<IndexEntry>& map);

/// Ordering of the reduced state x = [theta(non-slack); V(PQ)] and output
/// y = [P(non-slack); Q(PQ)].
class StateLayout {
 public:
  StateLayout() = default;
  StateLayout(std::vector<int> non_slack, std::vector<int> pq);

  /// N = 2n - m - 2.
  int dim() const { return static_cast<int>(non_slack_.size() + pq_.size()); }
  int angle_count() const { return static_cast<int>(non_slack_.size()); }
  int magnitude_count() const { return static_cast<int>(pq_.size()); }

  /// 0-based bus indices in row/column order.
  const std::vector<int>& non_slack() const { return non_slack_; }
  const std::vector<int>& pq() const { return pq_; }

  std::vector<IndexEntry> row_map() const;
  std::vector<IndexEntry> col_map() const;

  Vector state(const Vector& v, const Vector& theta) const;
  Vector output(const Vector& p, const Vector& q) const;

  /// Overwrites the free coordinates of (v, theta) with x.
  void apply_state(const Vector& x, Vector& v, Vector& theta) const;

  /// Row of y holding P at the bus, or -1 for the slack bus.
  int p_row(int bus_index) const;
  /// Row of y holding Q at the bus, or -1 if the bus is not PQ.
  int q_row(int bus_index) const;

 private:
  std::vector<int> non_slack_;
  std::vector<int> pq_;
};

/// Validated grid model. Bus i in the API is the 0-based index id - 1.
///
/// The admittance matrix uses the off-diagonal / negated-sum convention:
/// [y]_ij = Y_ij for i != j and [y]_ii = -sum_{k != i} Y_ik. Node-to-ground
/// shunts are kept out of it and enter the injections as a separate term.
class NetworkModel {
 public:
  int bus_count() const { return static_cast<int>(buses_.size()); }
  double base_mva() const { return base_mva_; }

  const std::vector<BusSpec>& buses() const { return buses_; }
  const std::vector<BranchSpec>& branches() const { return branches_; }
  const ComplexMatrix& admittance() const { return admittance_; }
  const StateLayout& layout() const { return layout_; }

  const Vector& shunt_g() const { return shunt_g_; }
  const Vector& shunt_b() const { return shunt_b_; }

  BusRole role(int bus_index) const { return buses_[static_cast<std::size_t>(bus_index)].role; }
  int slack_index() const { return slack_; }
  /// Number of PV buses (m).
  int pv_count() const;
  bool adjacent(int i, int j) const;

 private:
  friend NetworkModel build_network(std::vector<BusSpec>, std::vector<BranchSpec>, double);

  std::vector<BusSpec> buses_;
  std::vector<BranchSpec> branches_;
  ComplexMatrix admittance_;
  Vector shunt_g_;
  Vector shunt_b_;
  StateLayout layout_;
  int slack_ = -1;
  double base_mva_ = 100.0;
};

/// Validates buses and branches and builds the admittance matrix.
/// Buses may be given in any order; they are stored sorted by id.
/// Throws ConfigError on duplicate ids, gaps, dangling branch endpoints,
/// self-loops, or a slack count other than one.
NetworkModel build_network(std::vector<BusSpec> buses, std::vector<BranchSpec> branches,
                           double base_mva = 100.0);

struct Injections {
  Vector p;
  Vector q;
};

/// Bus powers drawn from the network (positive for net load) at (v, theta):
///   P_i = V_i sum_{k!=i} V_k (G_ik cos t_ik + B_ik sin t_ik) - V_i^2 sum_{k!=i} G_ik - V_i^2 g_i
///   Q_i = V_i sum_{k!=i} V_k (G_ik sin t_ik - B_ik cos t_ik) + V_i^2 sum_{k!=i} B_ik + V_i^2 b_i
/// with t_ik = theta_i - theta_k.
Injections compute_injections(const NetworkModel& model, const Vector& v, const Vector& theta);

struct OperatingPoint {
  Vector v;
  Vector theta;
  Vector p;
  Vector q;
  bool solved = false;
};

/// Builds a point whose p, q are evaluated from (v, theta).
OperatingPoint make_operating_point(const NetworkModel& model, const Vector& v,
                                    const Vector& theta);

/// Flat start: V = 1, theta = 0.
OperatingPoint flat_point(const NetworkModel& model);

}  // namespace jacoest
