#include "sodta/ctm.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>

namespace sodta {

NextHopTable free_flow_next_hops(const Network& network, int destination) {
  const auto n = network.num_cells();
  constexpr int kInf = std::numeric_limits<int>::max();
  NextHopTable table;
  table.distance.assign(n, kInf);
  table.next_hop.assign(n, -1);

  // Dijkstra on the reversed graph; every traversed cell costs one step.
  using Item = std::pair<int, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  table.distance[static_cast<std::size_t>(destination)] = 0;
  heap.emplace(0, destination);
  while (!heap.empty()) {
    auto [d, j] = heap.top();
    heap.pop();
    if (d != table.distance[static_cast<std::size_t>(j)]) continue;
    for (int i : network.predecessors(j)) {
      if (network.is_sink(i)) continue;
      int nd = d + 1;
      if (nd < table.distance[static_cast<std::size_t>(i)]) {
        table.distance[static_cast<std::size_t>(i)] = nd;
        heap.emplace(nd, i);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(i) == destination || table.distance[i] == kInf) continue;
    // successors are ascending, so the first match is the smallest id
    for (int j : network.successors(static_cast<int>(i))) {
      if (table.distance[static_cast<std::size_t>(j)] == table.distance[i] - 1) {
        table.next_hop[i] = j;
        break;
      }
    }
  }
  return table;
}

std::vector<Path> shortest_paths(const Network& network) {
  std::vector<Path> paths;
  paths.reserve(network.num_ods());
  for (std::size_t k = 0; k < network.num_ods(); ++k) {
    const auto& od = network.od(static_cast<int>(k));
    auto table = free_flow_next_hops(network, od.destination);
    if (table.next_hop[static_cast<std::size_t>(od.origin)] < 0 && od.origin != od.destination) {
      throw NetworkError("unreachable OD destination " + std::to_string(network.external_id(od.destination)));
    }
    Path p;
    p.od = static_cast<int>(k);
    for (int c = od.origin; c >= 0; c = table.next_hop[static_cast<std::size_t>(c)]) p.cells.push_back(c);
    paths.push_back(std::move(p));
  }
  return paths;
}

std::size_t Routing::key(int cell, int t, int od) const {
  return (static_cast<std::size_t>(cell) * steps_ + static_cast<std::size_t>(t)) * ods_ + static_cast<std::size_t>(od);
}

std::span<const double> Routing::split(int cell, int t, int od) const {
  auto k = key(cell, t, od);
  return std::span<const double>(fractions_).subspan(offset_[k], offset_[k + 1] - offset_[k]);
}

namespace {

void init_routing(const Network& network, std::size_t& steps, std::size_t& ods,
                      std::vector<std::size_t>& offset, std::vector<double>& fractions) {
  steps = static_cast<std::size_t>(std::max(network.flow_steps(), 0));
  ods = network.num_ods();
  offset.assign(network.num_cells() * steps * ods + 1, 0);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < network.num_cells(); ++i) {
    const auto deg = network.out_links(static_cast<int>(i)).size();
    for (std::size_t r = 0; r < steps * ods; ++r) {
      offset[i * steps * ods + r] = pos;
      pos += deg;
    }
  }
  offset.back() = pos;
  fractions.assign(pos, 0.0);
}

}  // namespace

Routing Routing::from_paths(const Network& network, const std::vector<Path>& paths) {
  Routing r;
  init_routing(network, r.steps_, r.ods_, r.offset_, r.fractions_);
  for (const auto& p : paths) {
    for (std::size_t s = 0; s + 1 < p.cells.size(); ++s) {
      const int i = p.cells[s];
      const auto outs = network.out_links(i);
      for (std::size_t pos = 0; pos < outs.size(); ++pos) {
        if (network.link(outs[pos]).head != p.cells[s + 1]) continue;
        for (std::size_t t = 0; t < r.steps_; ++t) {
          r.fractions_[r.offset_[r.key(i, static_cast<int>(t), p.od)] + pos] = 1.0;
        }
      }
    }
  }
  return r;
}

Routing Routing::from_flows(const Network& network, std::span<const double> values) {
  Routing r;
  init_routing(network, r.steps_, r.ods_, r.offset_, r.fractions_);
  const VariableLayout layout(network);
  std::vector<NextHopTable> hops;
  for (const auto& od : network.ods()) hops.push_back(free_flow_next_hops(network, od.destination));

  for (std::size_t i = 0; i < network.num_cells(); ++i) {
    const auto outs = network.out_links(static_cast<int>(i));
    if (outs.empty()) continue;
    for (std::size_t t = 0; t < r.steps_; ++t) {
      for (std::size_t k = 0; k < r.ods_; ++k) {
        const auto base = r.offset_[r.key(static_cast<int>(i), static_cast<int>(t), static_cast<int>(k))];
        double total = 0.0;
        for (int l : outs) total += std::max(0.0, values[layout.flow(l, static_cast<int>(t), static_cast<int>(k))]);
        if (total > 1e-12) {
          for (std::size_t pos = 0; pos < outs.size(); ++pos) {
            r.fractions_[base + pos] =
                std::max(0.0, values[layout.flow(outs[pos], static_cast<int>(t), static_cast<int>(k))]) / total;
          }
          continue;
        }
        const int next = hops[k].next_hop[i];
        for (std::size_t pos = 0; pos < outs.size(); ++pos) {
          if (network.link(outs[pos]).head == next) r.fractions_[base + pos] = 1.0;
        }
      }
    }
  }
  return r;
}

std::vector<double> SimTrace::values() const {
  std::vector<double> v(x);
  v.insert(v.end(), y.begin(), y.end());
  return v;
}

SimTrace simulate(const Network& network, const SignalSchedule& signals, const DemandProfile& demand,
                  const Routing& routing) {
  SimTrace trace;
  trace.layout = VariableLayout(network);
  const auto& layout = trace.layout;
  trace.x.assign(layout.num_occupancy(), 0.0);
  trace.y.assign(layout.num_flow(), 0.0);
  const auto T = static_cast<std::size_t>(network.horizon());
  const auto K = network.num_ods();
  if (K == 0) return trace;
  const auto D = demand.table(network);
  const auto n = network.num_cells();
  const std::size_t y0 = layout.num_occupancy();

  for (std::size_t i = 0; i < n; ++i) {
    if (!network.is_source(static_cast<int>(i))) continue;
    for (std::size_t k = 0; k < K; ++k) trace.x[layout.occupancy(static_cast<int>(i), 0, static_cast<int>(k))] = D[i * T * K + k];
  }

  std::vector<double> want(network.num_links() * K);
  std::vector<double> send(network.num_links());
  std::vector<double> out_scale(n), in_scale(n);

  for (int t = 0; t + 1 < static_cast<int>(T); ++t) {
    std::fill(send.begin(), send.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const int c = static_cast<int>(i);
      const auto outs = network.out_links(c);
      if (outs.empty()) continue;
      double total = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        const double xi = trace.x[layout.occupancy(c, t, static_cast<int>(k))];
        const auto frac = routing.split(c, t, static_cast<int>(k));
        for (std::size_t pos = 0; pos < outs.size(); ++pos) {
          const double w = xi > 0.0 ? xi * frac[pos] : 0.0;
          want[static_cast<std::size_t>(outs[pos]) * K + k] = w;
          send[static_cast<std::size_t>(outs[pos])] += w;
          total += w;
        }
      }
      double cap = network.cell(c).sat_flow;
      if (network.is_intersection(c)) cap = std::min(cap, effective_sat_flow(network, signals, c, t));
      out_scale[i] = total > cap ? cap / total : 1.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
      const int c = static_cast<int>(j);
      const auto ins = network.in_links(c);
      if (ins.empty()) continue;
      double incoming = 0.0;
      for (int l : ins) incoming += send[static_cast<std::size_t>(l)] * out_scale[static_cast<std::size_t>(network.link(l).tail)];
      double receive = network.cell(c).sat_flow;
      if (!network.is_sink(c)) {
        double occupied = 0.0;
        for (std::size_t k = 0; k < K; ++k) occupied += trace.x[layout.occupancy(c, t, static_cast<int>(k))];
        receive = std::min(receive, std::max(0.0, network.delta() * (network.cell(c).max_occupancy - occupied)));
      }
      in_scale[j] = incoming > receive ? receive / incoming : 1.0;
    }

    for (std::size_t l = 0; l < network.num_links(); ++l) {
      const auto& lk = network.link(static_cast<int>(l));
      const double s = out_scale[static_cast<std::size_t>(lk.tail)] * in_scale[static_cast<std::size_t>(lk.head)];
      for (std::size_t k = 0; k < K; ++k) {
        trace.y[layout.flow(static_cast<int>(l), t, static_cast<int>(k)) - y0] = want[l * K + k] * s;
      }
    }

    for (std::size_t i = 0; i < n; ++i) {
      const int c = static_cast<int>(i);
      for (std::size_t k = 0; k < K; ++k) {
        const int od = static_cast<int>(k);
        double next = trace.x[layout.occupancy(c, t, od)];
        for (int l : network.out_links(c)) next -= trace.y[layout.flow(l, t, od) - y0];
        for (int l : network.in_links(c)) next += trace.y[layout.flow(l, t, od) - y0];
        if (network.is_source(c)) next += D[(i * T + static_cast<std::size_t>(t) + 1) * K + k];
        trace.x[layout.occupancy(c, t + 1, od)] = std::max(0.0, next);
      }
    }
  }
  return trace;
}

SimTrace simulate(const Network& network, const SignalSchedule& signals, const DemandProfile& demand,
                  const std::vector<Path>& paths) {
  return simulate(network, signals, demand, Routing::from_paths(network, paths));
}

double total_travel_time(const SimTrace& trace, const Network& network) {
  double sum = 0.0;
  for (std::size_t i = 0; i < network.num_cells(); ++i) {
    if (network.is_sink(static_cast<int>(i))) continue;
    for (int t = 0; t < network.horizon(); ++t) {
      for (std::size_t k = 0; k < network.num_ods(); ++k) {
        sum += trace.occupancy(static_cast<int>(i), t, static_cast<int>(k));
      }
    }
  }
  return network.tau() * sum / 3600.0;
}

}  // namespace sodta
