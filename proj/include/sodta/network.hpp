#ifndef SODTA_NETWORK_HPP_
#define SODTA_NETWORK_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sodta {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

enum class CellKind { Ordinary, Source, Sink, Intersection, Diverge };

const char* to_string(CellKind kind);
CellKind cell_kind_from_string(const std::string& name);

struct Cell {
  int id = 0;  // external id, as given in the scenario
  CellKind kind = CellKind::Ordinary;
  double max_occupancy = 0.0;  // M_i, kUnbounded for sources and sinks
  double sat_flow = 0.0;       // F_i, vehicles per time step
};

struct Link {
  int tail = 0;  // dense cell index
  int head = 0;
};

struct OdPair {
  int origin = 0;  // dense cell index
  int destination = 0;
};

class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Immutable CTM graph. Cells are stored densely in ascending external-id
/// order and links in ascending (tail, head) order; every downstream index
/// space derives from this ordering.
class Network {
 public:
  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_links() const { return links_.size(); }
  std::size_t num_ods() const { return ods_.size(); }
  int horizon() const { return horizon_; }
  /// Number of flow steps; flows at step t move vehicles from slot t to t+1.
  int flow_steps() const { return horizon_ - 1; }
  double delta() const { return delta_; }
  double tau() const { return tau_; }

  const Cell& cell(int i) const { return cells_[static_cast<std::size_t>(i)]; }
  std::span<const Cell> cells() const { return cells_; }
  const Link& link(int l) const { return links_[static_cast<std::size_t>(l)]; }
  std::span<const Link> links() const { return links_; }
  const OdPair& od(int k) const { return ods_[static_cast<std::size_t>(k)]; }
  std::span<const OdPair> ods() const { return ods_; }

  /// Link indices leaving / entering a cell, ascending.
  std::span<const int> out_links(int i) const;
  std::span<const int> in_links(int i) const;
  /// S(i) and P(i) as dense cell indices, ascending.
  std::span<const int> successors(int i) const;
  std::span<const int> predecessors(int i) const;

  /// Dense index for an external cell id; -1 if unknown.
  int index_of(int external_id) const;
  int external_id(int i) const { return cell(i).id; }
  /// Link index for a (tail, head) dense pair; -1 if absent.
  int find_link(int tail, int head) const;

  bool is_sink(int i) const { return cell(i).kind == CellKind::Sink; }
  bool is_source(int i) const { return cell(i).kind == CellKind::Source; }
  bool is_intersection(int i) const { return cell(i).kind == CellKind::Intersection; }

 private:
  friend Network build_network(std::vector<Cell>, const std::vector<std::pair<int, int>>&,
                               double, double, int,
                               const std::vector<std::pair<int, int>>&);
  Network() = default;

  std::vector<Cell> cells_;
  std::vector<Link> links_;
  std::vector<OdPair> ods_;
  double delta_ = 1.0;
  double tau_ = 1.0;
  int horizon_ = 1;

  // CSR adjacency
  std::vector<int> out_start_, out_links_, out_cells_;
  std::vector<int> in_start_, in_links_, in_cells_;
  std::vector<std::pair<int, int>> id_index_;  // sorted (external id, dense)
};

/// Validates and builds a network. Links and OD pairs are given as
/// (external tail, external head) and (external origin, external destination).
Network build_network(std::vector<Cell> cells, const std::vector<std::pair<int, int>>& links,
                      double delta, double tau, int horizon,
                      const std::vector<std::pair<int, int>>& od_pairs);

/// Binary green/red status g_i^t for every intersection cell and time slot.
class SignalSchedule {
 public:
  SignalSchedule() = default;
  static SignalSchedule always_green(const Network& network);
  /// Green only at the listed (dense cell, t) pairs; every other intersection
  /// slot is red. Throws NetworkError for non-intersection cells or t out of range.
  static SignalSchedule from_green_list(const Network& network,
                                        const std::vector<std::pair<int, int>>& green);

  bool green(int cell, int t) const;
  bool empty() const { return status_.empty(); }

 private:
  int horizon_ = 0;
  std::vector<int> slot_;  // dense cell -> intersection slot, -1 otherwise
  std::vector<std::uint8_t> status_;
};

/// f_i^t = g_i^t F_i for an intersection cell.
double effective_sat_flow(const Network& network, const SignalSchedule& signals, int cell, int t);

struct DemandEntry {
  int cell = 0;  // dense
  int t = 0;
  int od = 0;
  double vehicles = 0.0;
};

struct DemandProfile {
  std::vector<DemandEntry> entries;

  /// Dense table indexed (cell * horizon + t) * num_ods + od; duplicates add up.
  std::vector<double> table(const Network& network) const;
  double total() const;
  DemandProfile scaled(double factor) const;
};

/// Lists every violation of the demand invariants; empty means well-formed.
std::vector<std::string> validate_demand(const Network& network, const DemandProfile& demand);

}  // namespace sodta

#endif  // SODTA_NETWORK_HPP_
