#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "sodta/ctm.hpp"
#include "sodta/formulation.hpp"

using namespace sodta;

namespace {

Network chain(int horizon, double sat = 1.0, double m = 100.0, double tau = 6.0) {
  std::vector<Cell> cells = {{1, CellKind::Source, 0.0, sat},
                             {2, CellKind::Ordinary, m, sat},
                             {3, CellKind::Ordinary, m, sat},
                             {4, CellKind::Sink, 0.0, sat}};
  return build_network(cells, {{1, 2}, {2, 3}, {3, 4}}, 1.0, tau, horizon, {{1, 4}});
}

// Lexicographically smallest among the minimum-length paths.
std::vector<int> best_by_enumeration(const Network& net, int o, int d) {
  auto paths = oracles::all_simple_paths(net, o, d);
  std::sort(paths.begin(), paths.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return paths.empty() ? std::vector<int>{} : paths.front();
}

// Vehicles injected up to slot t versus vehicles held anywhere at slot t.
void expect_conservation(const Network& net, const DemandProfile& demand, const SimTrace& trace) {
  const auto table = demand.table(net);
  const int T = net.horizon();
  const auto K = static_cast<int>(net.num_ods());
  for (int k = 0; k < K; ++k) {
    double injected = 0.0;
    for (int t = 0; t < T; ++t) {
      double held = 0.0;
      for (int i = 0; i < static_cast<int>(net.num_cells()); ++i) {
        injected += table[(static_cast<std::size_t>(i) * T + t) * K + k];
        held += trace.occupancy(i, t, k);
      }
      EXPECT_NEAR(held, injected, 1e-12) << "od " << k << " slot " << t;
    }
  }
}

}  // namespace

TEST(Ctm, ChainFreeFlowMovesOneCellPerStep) {
  const auto net = chain(5);
  DemandProfile d;
  d.entries = {{0, 0, 0, 1.0}};
  const auto trace = simulate(net, SignalSchedule::always_green(net), d, shortest_paths(net));
  for (int t = 0; t < 5; ++t) {
    for (int i = 0; i < 4; ++i) {
      const double expected = (i == t && t < 3) || (i == 3 && t >= 3) ? 1.0 : 0.0;
      EXPECT_DOUBLE_EQ(trace.occupancy(i, t, 0), expected) << "cell " << i << " slot " << t;
    }
  }
  EXPECT_DOUBLE_EQ(total_travel_time(trace, net), 18.0 / 3600.0);
}

TEST(Ctm, TravelTimeIgnoresSinks) {
  const auto net = chain(5);
  SimTrace trace{VariableLayout(net), std::vector<double>(VariableLayout(net).num_occupancy(), 0.0),
                 std::vector<double>(VariableLayout(net).num_flow(), 0.0)};
  trace.x[trace.layout.occupancy(3, 2, 0)] = 5.0;
  EXPECT_DOUBLE_EQ(total_travel_time(trace, net), 0.0);
  trace.x[trace.layout.occupancy(1, 2, 0)] = 1.0;
  EXPECT_DOUBLE_EQ(total_travel_time(trace, net), 6.0 / 3600.0);
}

TEST(Ctm, SaturationFlowQueuesAtSource) {
  const auto net = chain(8, 1.0);
  DemandProfile d;
  d.entries = {{0, 0, 0, 3.0}};
  const auto trace = simulate(net, SignalSchedule::always_green(net), d, shortest_paths(net));
  EXPECT_DOUBLE_EQ(trace.occupancy(0, 0, 0), 3.0);
  EXPECT_DOUBLE_EQ(trace.occupancy(0, 1, 0), 2.0);
  EXPECT_DOUBLE_EQ(trace.occupancy(0, 2, 0), 1.0);
  EXPECT_DOUBLE_EQ(trace.occupancy(3, 7, 0), 3.0);
  expect_conservation(net, d, trace);
}

TEST(Ctm, MergeSharesReceivingCapacityProportionally) {
  std::vector<Cell> cells = {{1, CellKind::Source, 0.0, 4.0},
                             {2, CellKind::Source, 0.0, 4.0},
                             {3, CellKind::Ordinary, 10.0, 2.0},
                             {4, CellKind::Sink, 0.0, 4.0}};
  const auto net = build_network(cells, {{1, 3}, {2, 3}, {3, 4}}, 1.0, 1.0, 6, {{1, 4}, {2, 4}});
  DemandProfile d;
  d.entries = {{0, 0, 0, 3.0}, {1, 0, 1, 1.0}};
  const auto trace = simulate(net, SignalSchedule::always_green(net), d, shortest_paths(net));
  // receiving 2 split 3:1
  EXPECT_DOUBLE_EQ(trace.flow(0, 0, 0), 1.5);
  EXPECT_DOUBLE_EQ(trace.flow(1, 0, 1), 0.5);
  const auto central = build_central_system(net, SignalSchedule::always_green(net), d);
  EXPECT_TRUE(check_feasibility(central.system, trace.values(), 1e-12).feasible());
  expect_conservation(net, d, trace);
}

TEST(Ctm, SpillbackLimitsInflowByFreeSpace) {
  std::vector<Cell> cells = {{1, CellKind::Source, 0.0, 5.0},
                             {2, CellKind::Ordinary, 4.0, 5.0},
                             {3, CellKind::Ordinary, 2.0, 0.5},
                             {4, CellKind::Sink, 0.0, 5.0}};
  const auto net = build_network(cells, {{1, 2}, {2, 3}, {3, 4}}, 0.5, 1.0, 12, {{1, 4}});
  DemandProfile d;
  d.entries = {{0, 0, 0, 6.0}};
  const auto signals = SignalSchedule::always_green(net);
  const auto trace = simulate(net, signals, d, shortest_paths(net));
  const auto central = build_central_system(net, signals, d);
  const auto report = check_feasibility(central.system, trace.values(), 1e-12);
  EXPECT_TRUE(report.feasible()) << report.max_violation;
  for (int t = 0; t < net.horizon(); ++t) EXPECT_LE(trace.occupancy(2, t, 0), 2.0 + 1e-12);
  expect_conservation(net, d, trace);
}

TEST(Ctm, RedSignalHoldsVehicles) {
  std::vector<Cell> cells = {{1, CellKind::Source, 0.0, 2.0},
                             {2, CellKind::Intersection, 8.0, 2.0},
                             {3, CellKind::Sink, 0.0, 2.0}};
  const auto net = build_network(cells, {{1, 2}, {2, 3}}, 1.0, 1.0, 5, {{1, 3}});
  const auto signals = SignalSchedule::from_green_list(net, {{1, 3}});
  DemandProfile d;
  d.entries = {{0, 0, 0, 1.0}};
  const auto trace = simulate(net, signals, d, shortest_paths(net));
  EXPECT_DOUBLE_EQ(trace.occupancy(1, 1, 0), 1.0);
  EXPECT_DOUBLE_EQ(trace.occupancy(1, 3, 0), 1.0);
  EXPECT_DOUBLE_EQ(trace.occupancy(2, 4, 0), 1.0);
}

TEST(Ctm, ShortestPathOnChainIsTheChain) {
  const auto net = chain(5);
  const auto paths = shortest_paths(net);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(paths[0].cells, (std::vector<int>{0, 1, 2, 3}));
}

TEST(Ctm, ShortestPathsMatchEnumerationOnGrid) {
  const auto inst = oracles::load_instance("grid2x2");
  const auto paths = shortest_paths(inst.network);
  ASSERT_EQ(paths.size(), inst.network.num_ods());
  for (const auto& p : paths) {
    const auto& od = inst.network.od(p.od);
    EXPECT_EQ(p.cells, best_by_enumeration(inst.network, od.origin, od.destination));
  }
}

TEST(Ctm, ShortestPathsMatchEnumerationOnRandomDags) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 4 + trial % 6;
    std::vector<Cell> cells;
    cells.push_back({0, CellKind::Source, 0.0, 1.0});
    for (int i = 1; i <= n; ++i) cells.push_back({i, CellKind::Ordinary, 5.0, 1.0});
    cells.push_back({n + 1, CellKind::Sink, 0.0, 1.0});
    std::vector<std::pair<int, int>> links = {{0, 1}, {n, n + 1}};
    for (int a = 1; a <= n; ++a) {
      for (int b = 1; b <= n; ++b) {
        if (a != b && (b == a + 1 || unit(rng) < 0.25)) links.push_back({a, b});
      }
    }
    const auto net = build_network(cells, links, 1.0, 1.0, 3, {{0, n + 1}});
    const auto paths = shortest_paths(net);
    EXPECT_EQ(paths[0].cells, best_by_enumeration(net, 0, n + 1)) << "trial " << trial;
    const auto table = free_flow_next_hops(net, n + 1);
    EXPECT_EQ(table.distance[0] + 1, static_cast<int>(paths[0].cells.size()));
  }
}

TEST(Ctm, RoutingFromFlowsReproducesSplits) {
  std::vector<Cell> cells = {{1, CellKind::Source, 0.0, 4.0},
                             {2, CellKind::Diverge, 10.0, 4.0},
                             {3, CellKind::Ordinary, 10.0, 4.0},
                             {4, CellKind::Ordinary, 10.0, 4.0},
                             {5, CellKind::Sink, 0.0, 4.0}};
  const auto net = build_network(cells, {{1, 2}, {2, 3}, {2, 4}, {3, 5}, {4, 5}}, 1.0, 1.0, 5, {{1, 5}});
  const VariableLayout layout(net);
  std::vector<double> values(layout.size(), 0.0);
  values[layout.flow(net.find_link(1, 2), 1, 0)] = 1.0;
  values[layout.flow(net.find_link(1, 3), 1, 0)] = 3.0;
  const auto routing = Routing::from_flows(net, values);
  const auto split = routing.split(1, 1, 0);
  ASSERT_EQ(split.size(), 2u);
  EXPECT_DOUBLE_EQ(split[0], 0.25);
  EXPECT_DOUBLE_EQ(split[1], 0.75);
  // no flow given: free-flow next hop (smallest id on a tie)
  const auto fallback = routing.split(1, 2, 0);
  ASSERT_EQ(fallback.size(), 2u);
  EXPECT_DOUBLE_EQ(fallback[0], 1.0);
  EXPECT_DOUBLE_EQ(fallback[1], 0.0);

  DemandProfile d;
  d.entries = {{0, 0, 0, 4.0}};
  const auto trace = simulate(net, SignalSchedule::always_green(net), d, routing);
  EXPECT_DOUBLE_EQ(trace.flow(net.find_link(1, 2), 1, 0), 1.0);
  EXPECT_DOUBLE_EQ(trace.flow(net.find_link(1, 3), 1, 0), 3.0);
}

TEST(Ctm, BundledScenariosInitialiseFeasibly) {
  for (const auto& name : oracles::bundled_scenarios()) {
    const auto inst = oracles::load_instance(name);
    const auto trace = simulate(inst.network, inst.signals, inst.demand, shortest_paths(inst.network));
    const auto central = build_central_system(inst.network, inst.signals, inst.demand);
    const auto report = check_feasibility(central.system, trace.values(), 1e-9);
    EXPECT_TRUE(report.feasible()) << name << " max violation " << report.max_violation;
    expect_conservation(inst.network, inst.demand, trace);
  }
}
