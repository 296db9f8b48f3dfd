#include "sodta/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace sodta {

const char* to_string(CellKind kind) {
  switch (kind) {
    case CellKind::Ordinary: return "ordinary";
    case CellKind::Source: return "source";
    case CellKind::Sink: return "sink";
    case CellKind::Intersection: return "intersection";
    case CellKind::Diverge: return "diverge";
  }
  return "?";
}

CellKind cell_kind_from_string(const std::string& name) {
  if (name == "ordinary") return CellKind::Ordinary;
  if (name == "source") return CellKind::Source;
  if (name == "sink") return CellKind::Sink;
  if (name == "intersection") return CellKind::Intersection;
  if (name == "diverge") return CellKind::Diverge;
  throw NetworkError("unknown cell kind '" + name + "'");
}

namespace {

std::span<const int> csr_row(const std::vector<int>& start, const std::vector<int>& data, int i) {
  auto b = static_cast<std::size_t>(start[static_cast<std::size_t>(i)]);
  auto e = static_cast<std::size_t>(start[static_cast<std::size_t>(i) + 1]);
  return std::span<const int>(data).subspan(b, e - b);
}

bool reachable(const Network& net, int from, int to) {
  std::vector<char> seen(net.num_cells(), 0);
  std::queue<int> q;
  q.push(from);
  seen[static_cast<std::size_t>(from)] = 1;
  while (!q.empty()) {
    int i = q.front();
    q.pop();
    if (i == to) return true;
    if (net.is_sink(i)) continue;
    for (int j : net.successors(i)) {
      if (!seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = 1;
        q.push(j);
      }
    }
  }
  return false;
}

}  // namespace

std::span<const int> Network::out_links(int i) const { return csr_row(out_start_, out_links_, i); }
std::span<const int> Network::in_links(int i) const { return csr_row(in_start_, in_links_, i); }
std::span<const int> Network::successors(int i) const { return csr_row(out_start_, out_cells_, i); }
std::span<const int> Network::predecessors(int i) const { return csr_row(in_start_, in_cells_, i); }

int Network::index_of(int external_id) const {
  auto it = std::lower_bound(id_index_.begin(), id_index_.end(), std::make_pair(external_id, -1));
  if (it == id_index_.end() || it->first != external_id) return -1;
  return it->second;
}

int Network::find_link(int tail, int head) const {
  for (int l : out_links(tail)) {
    if (link(l).head == head) return l;
  }
  return -1;
}

Network build_network(std::vector<Cell> cells, const std::vector<std::pair<int, int>>& links,
                      double delta, double tau, int horizon,
                      const std::vector<std::pair<int, int>>& od_pairs) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw NetworkError("delta must be positive");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw NetworkError("tau must be positive");
  if (horizon < 1) throw NetworkError("horizon must be at least 1");
  if (cells.empty()) throw NetworkError("network has no cells");

  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < cells.size(); ++i) {
    if (cells[i].id == cells[i - 1].id) {
      throw NetworkError("duplicate cell id " + std::to_string(cells[i].id));
    }
  }
  for (auto& c : cells) {
    if (!(c.sat_flow >= 0.0)) {
      throw NetworkError("cell " + std::to_string(c.id) + ": saturation flow must be >= 0");
    }
    if (c.kind == CellKind::Source || c.kind == CellKind::Sink) {
      c.max_occupancy = kUnbounded;
    } else if (!(c.max_occupancy > 0.0)) {
      throw NetworkError("cell " + std::to_string(c.id) + ": max occupancy must be > 0");
    }
  }

  Network net;
  net.cells_ = std::move(cells);
  net.delta_ = delta;
  net.tau_ = tau;
  net.horizon_ = horizon;
  net.id_index_.reserve(net.cells_.size());
  for (std::size_t i = 0; i < net.cells_.size(); ++i) {
    net.id_index_.emplace_back(net.cells_[i].id, static_cast<int>(i));
  }

  for (const auto& [ext_tail, ext_head] : links) {
    int tail = net.index_of(ext_tail);
    int head = net.index_of(ext_head);
    if (tail < 0 || head < 0) {
      std::ostringstream os;
      os << "dangling link endpoint in (" << ext_tail << ", " << ext_head << ")";
      throw NetworkError(os.str());
    }
    if (tail == head) throw NetworkError("self-loop link on cell " + std::to_string(ext_tail));
    if (net.is_sink(tail)) throw NetworkError("sink cell " + std::to_string(ext_tail) + " has a successor");
    if (net.is_source(head)) {
      throw NetworkError("source cell " + std::to_string(ext_head) + " has a predecessor");
    }
    net.links_.push_back({tail, head});
  }
  std::sort(net.links_.begin(), net.links_.end(), [](const Link& a, const Link& b) {
    return a.tail != b.tail ? a.tail < b.tail : a.head < b.head;
  });
  for (std::size_t l = 1; l < net.links_.size(); ++l) {
    if (net.links_[l].tail == net.links_[l - 1].tail && net.links_[l].head == net.links_[l - 1].head) {
      throw NetworkError("duplicate link (" + std::to_string(net.external_id(net.links_[l].tail)) + ", " +
                         std::to_string(net.external_id(net.links_[l].head)) + ")");
    }
  }

  const std::size_t n = net.cells_.size();
  net.out_start_.assign(n + 1, 0);
  net.in_start_.assign(n + 1, 0);
  for (const auto& lk : net.links_) {
    ++net.out_start_[static_cast<std::size_t>(lk.tail) + 1];
    ++net.in_start_[static_cast<std::size_t>(lk.head) + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    net.out_start_[i + 1] += net.out_start_[i];
    net.in_start_[i + 1] += net.in_start_[i];
  }
  net.out_links_.resize(net.links_.size());
  net.out_cells_.resize(net.links_.size());
  net.in_links_.resize(net.links_.size());
  net.in_cells_.resize(net.links_.size());
  std::vector<int> out_fill(net.out_start_.begin(), net.out_start_.end() - 1);
  std::vector<int> in_fill(net.in_start_.begin(), net.in_start_.end() - 1);
  // Links are sorted by (tail, head) so out-lists come out ascending by head.
  // In-lists come out ascending by tail for the same reason.
  for (std::size_t l = 0; l < net.links_.size(); ++l) {
    const auto& lk = net.links_[l];
    auto o = static_cast<std::size_t>(out_fill[static_cast<std::size_t>(lk.tail)]++);
    net.out_links_[o] = static_cast<int>(l);
    net.out_cells_[o] = lk.head;
    auto p = static_cast<std::size_t>(in_fill[static_cast<std::size_t>(lk.head)]++);
    net.in_links_[p] = static_cast<int>(l);
    net.in_cells_[p] = lk.tail;
  }

  for (const auto& [ext_o, ext_d] : od_pairs) {
    int o = net.index_of(ext_o);
    int d = net.index_of(ext_d);
    if (o < 0 || d < 0) {
      throw NetworkError("OD pair (" + std::to_string(ext_o) + ", " + std::to_string(ext_d) +
                         ") references an unknown cell");
    }
    if (!net.is_source(o)) throw NetworkError("OD origin " + std::to_string(ext_o) + " is not a source cell");
    if (!net.is_sink(d)) throw NetworkError("OD destination " + std::to_string(ext_d) + " is not a sink cell");
    if (!reachable(net, o, d)) {
      throw NetworkError("unreachable destination " + std::to_string(ext_d) + " from origin " +
                         std::to_string(ext_o));
    }
    net.ods_.push_back({o, d});
  }
  return net;
}

SignalSchedule SignalSchedule::always_green(const Network& network) {
  SignalSchedule s;
  s.horizon_ = network.horizon();
  s.slot_.assign(network.num_cells(), -1);
  int slots = 0;
  for (std::size_t i = 0; i < network.num_cells(); ++i) {
    if (network.is_intersection(static_cast<int>(i))) s.slot_[i] = slots++;
  }
  s.status_.assign(static_cast<std::size_t>(slots) * static_cast<std::size_t>(s.horizon_), 1);
  return s;
}

SignalSchedule SignalSchedule::from_green_list(const Network& network,
                                               const std::vector<std::pair<int, int>>& green) {
  SignalSchedule s = always_green(network);
  std::fill(s.status_.begin(), s.status_.end(), 0);
  for (const auto& [cell, t] : green) {
    if (cell < 0 || static_cast<std::size_t>(cell) >= network.num_cells() || s.slot_[static_cast<std::size_t>(cell)] < 0) {
      throw NetworkError("signal entry for non-intersection cell");
    }
    if (t < 0 || t >= s.horizon_) throw NetworkError("signal entry time step out of range");
    s.status_[static_cast<std::size_t>(s.slot_[static_cast<std::size_t>(cell)] * s.horizon_ + t)] = 1;
  }
  return s;
}

bool SignalSchedule::green(int cell, int t) const {
  if (cell < 0 || static_cast<std::size_t>(cell) >= slot_.size() || slot_[static_cast<std::size_t>(cell)] < 0) {
    throw NetworkError("signal status requested for a non-intersection cell");
  }
  if (t < 0 || t >= horizon_) throw NetworkError("signal status requested outside the horizon");
  return status_[static_cast<std::size_t>(slot_[static_cast<std::size_t>(cell)] * horizon_ + t)] != 0;
}

double effective_sat_flow(const Network& network, const SignalSchedule& signals, int cell, int t) {
  if (cell < 0 || static_cast<std::size_t>(cell) >= network.num_cells() || !network.is_intersection(cell)) {
    throw NetworkError("effective saturation flow is defined for intersection cells only");
  }
  return signals.green(cell, t) ? network.cell(cell).sat_flow : 0.0;
}

std::vector<double> DemandProfile::table(const Network& network) const {
  const auto T = static_cast<std::size_t>(network.horizon());
  const auto K = network.num_ods();
  std::vector<double> out(network.num_cells() * T * K, 0.0);
  for (const auto& e : entries) {
    if (e.cell < 0 || static_cast<std::size_t>(e.cell) >= network.num_cells() || e.t < 0 ||
        e.t >= network.horizon() || e.od < 0 || static_cast<std::size_t>(e.od) >= K) {
      continue;  // reported by validate_demand
    }
    out[(static_cast<std::size_t>(e.cell) * T + static_cast<std::size_t>(e.t)) * K +
        static_cast<std::size_t>(e.od)] += e.vehicles;
  }
  return out;
}

double DemandProfile::total() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.vehicles;
  return s;
}

DemandProfile DemandProfile::scaled(double factor) const {
  DemandProfile out = *this;
  for (auto& e : out.entries) e.vehicles *= factor;
  return out;
}

std::vector<std::string> validate_demand(const Network& network, const DemandProfile& demand) {
  std::vector<std::string> report;
  for (const auto& e : demand.entries) {
    std::ostringstream where;
    where << "demand entry (cell index " << e.cell << ", t " << e.t << ", od " << e.od << ")";
    if (e.od < 0 || static_cast<std::size_t>(e.od) >= network.num_ods()) {
      report.push_back(where.str() + ": unknown OD pair");
      continue;
    }
    if (e.cell < 0 || static_cast<std::size_t>(e.cell) >= network.num_cells()) {
      report.push_back(where.str() + ": unknown cell");
      continue;
    }
    if (e.t < 0 || e.t >= network.horizon()) report.push_back(where.str() + ": time step outside horizon");
    if (!std::isfinite(e.vehicles)) report.push_back(where.str() + ": non-finite demand");
    if (e.vehicles < 0.0) report.push_back(where.str() + ": negative demand");
    if (e.vehicles != 0.0 && e.cell != network.od(e.od).origin) {
      report.push_back(where.str() + ": demand at a cell other than the OD origin");
    }
  }
  return report;
}

}  // namespace sodta
