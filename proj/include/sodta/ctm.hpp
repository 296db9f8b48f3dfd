#ifndef SODTA_CTM_HPP_
#define SODTA_CTM_HPP_

#include <map>
#include <span>
#include <vector>

#include "sodta/layout.hpp"
#include "sodta/network.hpp"

namespace sodta {

struct Path {
  int od = 0;
  std::vector<int> cells;  // dense indices, origin first
};

/// Free-flow distance (in cells) to an OD destination and the next hop on the
/// lexicographically smallest shortest path. next_hop is -1 at the
/// destination and where the destination is unreachable.
struct NextHopTable {
  std::vector<int> distance;
  std::vector<int> next_hop;
};

NextHopTable free_flow_next_hops(const Network& network, int destination);

/// Minimum-hop path per OD (each traversed cell costs one step), ties broken
/// by the smallest cell-id sequence. Throws NetworkError if unreachable.
std::vector<Path> shortest_paths(const Network& network);

/// Per (cell, t, od) split of a cell's OD volume across its out-links.
/// Entries without an explicit split follow the free-flow next hop.
class Routing {
 public:
  Routing() = default;
  static Routing from_paths(const Network& network, const std::vector<Path>& paths);
  /// Splits proportional to the given per-OD flows (central layout order).
  /// Where a (cell, t, od) has no positive outflow the free-flow next hop is used.
  static Routing from_flows(const Network& network, std::span<const double> values);

  /// Fraction of cell i's OD volume sent on each out-link at step t, in
  /// out_links(i) order. Returns an empty span when nothing leaves.
  std::span<const double> split(int cell, int t, int od) const;

 private:
  std::size_t key(int cell, int t, int od) const;
  std::size_t steps_ = 0, ods_ = 0;
  std::vector<std::size_t> offset_;  // per key, into fractions_; size keys+1
  std::vector<double> fractions_;
};

/// Time-expanded CTM trajectory, stored in central layout order.
struct SimTrace {
  VariableLayout layout;
  std::vector<double> x;  // occupancy block
  std::vector<double> y;  // flow block

  double occupancy(int cell, int t, int od) const { return x[layout.occupancy(cell, t, od)]; }
  double flow(int link, int t, int od) const { return y[layout.flow(link, t, od) - layout.num_occupancy()]; }
  /// x followed by y: a point in the central variable space.
  std::vector<double> values() const;
};

/// Nonlinear CTM run: sending is capped by F_i (f_i^t at intersections),
/// receiving by min(F_j, delta (M_j - x_j)); shares are scaled
/// proportionally at merges and diverges and split across ODs in proportion
/// to each OD's sendable volume.
SimTrace simulate(const Network& network, const SignalSchedule& signals, const DemandProfile& demand,
                  const Routing& routing);

SimTrace simulate(const Network& network, const SignalSchedule& signals, const DemandProfile& demand,
                  const std::vector<Path>& paths);

/// tau * sum of non-sink occupancy, in hours (tau is in seconds).
double total_travel_time(const SimTrace& trace, const Network& network);

}  // namespace sodta

#endif  // SODTA_CTM_HPP_
