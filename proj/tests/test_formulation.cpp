#include <gtest/gtest.h>

#include <map>
#include <random>

#include "oracles.hpp"
#include "sodta/formulation.hpp"

using namespace sodta;

namespace {

Network chain(int horizon) {
  std::vector<Cell> cells = {{1, CellKind::Source, 0.0, 1.0},
                             {2, CellKind::Ordinary, 10.0, 1.0},
                             {3, CellKind::Ordinary, 10.0, 1.0},
                             {4, CellKind::Sink, 0.0, 1.0}};
  return build_network(cells, {{1, 2}, {2, 3}, {3, 4}}, 1.0, 1.0, horizon, {{1, 4}});
}

std::map<RowKind, std::size_t> count_rows(const ConstraintSystem& sys) {
  std::map<RowKind, std::size_t> out;
  for (std::size_t r = 0; r < sys.num_rows(); ++r) ++out[sys.tag(r).kind];
  return out;
}

}  // namespace

TEST(Formulation, ChainRowCounts) {
  const auto net = chain(5);
  DemandProfile d;
  d.entries = {{0, 0, 0, 1.0}};
  const auto p = build_central_system(net, SignalSchedule::always_green(net), d);
  auto counts = count_rows(p.system);
  EXPECT_EQ(counts[RowKind::Conservation] + counts[RowKind::SourceConservation] + counts[RowKind::SinkConservation],
            20u);
  EXPECT_EQ(counts[RowKind::SourceConservation], 5u);
  EXPECT_EQ(counts[RowKind::SinkConservation], 5u);
  // 3 cells with successors x 4 steps
  EXPECT_EQ(counts[RowKind::OutflowOccupancy], 12u);
  EXPECT_EQ(counts[RowKind::OutflowSaturation], 12u);
  // 3 cells with predecessors (sink included)
  EXPECT_EQ(counts[RowKind::InflowSaturation], 12u);
  // sink excluded
  EXPECT_EQ(counts[RowKind::InflowCapacity], 8u);
  EXPECT_EQ(counts[RowKind::SignalOutflow], 0u);
  EXPECT_EQ(p.layout.size(), 4u * 5u + 3u * 4u);
}

TEST(Formulation, RowCountsOnGridMatchTemplateCounting) {
  const auto inst = oracles::load_instance("grid2x2");
  const auto& net = inst.network;
  const auto p = build_central_system(net, inst.signals, inst.demand);
  const std::size_t T = static_cast<std::size_t>(net.horizon()), S = T - 1, K = net.num_ods();
  std::size_t with_out = 0, with_in = 0, cap = 0, inter = 0;
  for (int i = 0; i < static_cast<int>(net.num_cells()); ++i) {
    if (!net.successors(i).empty()) ++with_out;
    if (!net.predecessors(i).empty()) ++with_in;
    if (!net.predecessors(i).empty() && !net.is_sink(i)) ++cap;
    if (net.is_intersection(i)) ++inter;
  }
  auto counts = count_rows(p.system);
  EXPECT_EQ(counts[RowKind::Conservation] + counts[RowKind::SourceConservation] + counts[RowKind::SinkConservation],
            net.num_cells() * T * K);
  EXPECT_EQ(counts[RowKind::OutflowOccupancy], with_out * S * K);
  EXPECT_EQ(counts[RowKind::OutflowSaturation], with_out * S);
  EXPECT_EQ(counts[RowKind::InflowSaturation], with_in * S);
  EXPECT_EQ(counts[RowKind::InflowCapacity], cap * S);
  EXPECT_EQ(counts[RowKind::SignalOutflow], inter * S);
  EXPECT_GT(inter, 0u);
}

TEST(Formulation, ObjectiveWeightsNonSinkOccupancy) {
  const auto net = chain(3);
  DemandProfile d;
  const auto p = build_central_system(net, SignalSchedule::always_green(net), d);
  for (std::size_t g = 0; g < p.layout.size(); ++g) {
    const auto c = p.layout.decode(g);
    const bool counted = c.kind == VarKind::Occupancy && !net.is_sink(c.entity);
    EXPECT_DOUBLE_EQ(p.objective.coefficients[g], counted ? 1.0 : 0.0);
  }
  std::vector<double> v(p.layout.size(), 0.0);
  v[p.layout.occupancy(1, 1, 0)] = 1.0;
  EXPECT_DOUBLE_EQ(evaluate_objective(p.objective, v), 1.0);
  std::fill(v.begin(), v.end(), 0.0);
  v[p.layout.occupancy(3, 2, 0)] = 7.0;
  EXPECT_DOUBLE_EQ(evaluate_objective(p.objective, v), 0.0);
}

TEST(Formulation, InflowCapacityRowUsesDeltaAndM) {
  std::vector<Cell> cells = {{1, CellKind::Source, 0.0, 3.0},
                             {2, CellKind::Ordinary, 8.0, 3.0},
                             {3, CellKind::Sink, 0.0, 3.0}};
  const auto net = build_network(cells, {{1, 2}, {2, 3}}, 0.5, 1.0, 3, {{1, 3}});
  const auto p = build_central_system(net, SignalSchedule::always_green(net), DemandProfile{});
  bool seen = false;
  for (std::size_t r = 0; r < p.system.num_rows(); ++r) {
    const auto& tag = p.system.tag(r);
    if (tag.kind != RowKind::InflowCapacity || tag.t != 1) continue;
    seen = true;
    EXPECT_EQ(tag.cell, 1);
    EXPECT_DOUBLE_EQ(p.system.rhs(r), 4.0);
    const auto idx = p.system.row_indices(r);
    const auto val = p.system.row_values(r);
    for (std::size_t q = 0; q < idx.size(); ++q) {
      if (idx[q] == p.layout.occupancy(1, 1, 0)) EXPECT_DOUBLE_EQ(val[q], 0.5);
      if (idx[q] == p.layout.flow(0, 1, 0)) EXPECT_DOUBLE_EQ(val[q], 1.0);
    }
  }
  EXPECT_TRUE(seen);
}

TEST(Formulation, SignalRowsFollowGreenTimes) {
  std::vector<Cell> cells = {{1, CellKind::Source, 0.0, 2.0},
                             {2, CellKind::Intersection, 8.0, 3.0},
                             {3, CellKind::Sink, 0.0, 2.0}};
  const auto net = build_network(cells, {{1, 2}, {2, 3}}, 1.0, 1.0, 4, {{1, 3}});
  const auto signals = SignalSchedule::from_green_list(net, {{1, 1}});
  const auto p = build_central_system(net, signals, DemandProfile{});
  for (std::size_t r = 0; r < p.system.num_rows(); ++r) {
    const auto& tag = p.system.tag(r);
    if (tag.kind == RowKind::SignalOutflow) EXPECT_DOUBLE_EQ(p.system.rhs(r), tag.t == 1 ? 3.0 : 0.0);
  }
}

TEST(Formulation, DemandEntersSourceConservation) {
  const auto net = chain(4);
  DemandProfile d;
  d.entries = {{0, 0, 0, 1.5}, {0, 2, 0, 0.5}};
  const auto p = build_central_system(net, SignalSchedule::always_green(net), d);
  for (std::size_t r = 0; r < p.system.num_rows(); ++r) {
    const auto& tag = p.system.tag(r);
    if (tag.kind != RowKind::SourceConservation) continue;
    const double expected = tag.t == 0 ? 1.5 : tag.t == 2 ? 0.5 : 0.0;
    EXPECT_DOUBLE_EQ(p.system.rhs(r), expected);
  }
}

TEST(Formulation, RejectsEmptyOdSet) {
  std::vector<Cell> cells = {{1, CellKind::Source, 0.0, 1.0}, {2, CellKind::Sink, 0.0, 1.0}};
  const auto net = build_network(cells, {{1, 2}}, 1.0, 1.0, 3, {});
  EXPECT_THROW(build_central_system(net, SignalSchedule::always_green(net), DemandProfile{}), FormulationError);
}

TEST(Formulation, FeasibilityReportsRowsAndBounds) {
  ConstraintSystem sys(2);
  const std::vector<std::size_t> idx = {0, 1};
  const std::vector<double> one = {1.0, 1.0};
  sys.add_row(idx, one, Relation::LessEqual, 1.0, RowTag{});
  sys.add_row(std::span<const std::size_t>(idx).first(1), std::span<const double>(one).first(1), Relation::Equal, 0.5,
              RowTag{});
  EXPECT_TRUE(check_feasibility(sys, std::vector<double>{0.5, 0.5}, 1e-12).feasible());
  const auto bad = check_feasibility(sys, std::vector<double>{0.5, -0.25}, 1e-12);
  ASSERT_EQ(bad.violations.size(), 1u);
  EXPECT_TRUE(bad.violations[0].is_bound);
  EXPECT_DOUBLE_EQ(bad.max_violation, 0.25);
  const auto over = check_feasibility(sys, std::vector<double>{1.0, 0.5}, 1e-12);
  EXPECT_EQ(over.violations.size(), 2u);
  EXPECT_DOUBLE_EQ(over.max_violation, 0.5);
  EXPECT_THROW(check_feasibility(sys, std::vector<double>{1.0}, 1e-12), FormulationError);
  EXPECT_THROW(sys.add_row(std::vector<std::size_t>{2}, std::vector<double>{1.0}, Relation::Equal, 0.0, RowTag{}),
               FormulationError);
}

TEST(Formulation, FiniteDifferencesMatchConstantGradient) {
  const auto inst = oracles::load_instance("grid2x2");
  const auto p = build_central_system(inst.network, inst.signals, inst.demand);
  std::mt19937_64 rng(11);
  // quarter-integer points keep every sum exact
  std::uniform_int_distribution<int> quarter(0, 40);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(p.layout.size());
    for (auto& v : x) v = quarter(rng) / 4.0;
    const double f0 = evaluate_objective(p.objective, x);
    for (std::size_t j = 0; j < x.size(); ++j) {
      auto xh = x;
      xh[j] += 1.0;
      ASSERT_EQ(evaluate_objective(p.objective, xh) - f0, p.objective.coefficients[j]) << "index " << j;
    }
  }
}
