#include <gtest/gtest.h>

#include <algorithm>
#include <tuple>

#include "oracles.hpp"
#include "sodta/partition.hpp"

using namespace sodta;

namespace {

using RowKey = std::tuple<std::vector<std::size_t>, std::vector<double>, int, double, int, int, int, int>;

RowKey key(const ConstraintSystem& sys, std::size_t r, std::span<const std::size_t> to_global) {
  std::vector<std::pair<std::size_t, double>> terms;
  const auto idx = sys.row_indices(r);
  const auto val = sys.row_values(r);
  for (std::size_t p = 0; p < idx.size(); ++p) terms.emplace_back(to_global.empty() ? idx[p] : to_global[idx[p]], val[p]);
  std::sort(terms.begin(), terms.end());
  std::vector<std::size_t> gi;
  std::vector<double> gv;
  for (auto& [g, v] : terms) {
    gi.push_back(g);
    gv.push_back(v);
  }
  const auto& tag = sys.tag(r);
  return {gi, gv, static_cast<int>(sys.relation(r)), sys.rhs(r), static_cast<int>(tag.kind), tag.cell, tag.t, tag.od};
}

void expect_union_equals_central(const CentralProblem& central, const std::vector<SubProblem>& subs) {
  std::vector<RowKey> whole, pieces;
  for (std::size_t r = 0; r < central.system.num_rows(); ++r) whole.push_back(key(central.system, r, {}));
  std::vector<double> objective(central.layout.size(), 0.0);
  for (const auto& sp : subs) {
    EXPECT_TRUE(std::is_sorted(sp.global.begin(), sp.global.end()));
    for (std::size_t r = 0; r < sp.system.num_rows(); ++r) {
      pieces.push_back(key(sp.system, r, sp.global));
      EXPECT_EQ(key(sp.system, r, sp.global), key(central.system, sp.row_origin[r], {}));
    }
    for (std::size_t j = 0; j < sp.num_vars(); ++j) objective[sp.global[j]] += sp.objective[j];
  }
  std::sort(whole.begin(), whole.end());
  std::sort(pieces.begin(), pieces.end());
  EXPECT_EQ(whole, pieces);
  EXPECT_EQ(objective, central.objective.coefficients);
}

RegionAssignment four_regions(const Network& net) {
  // one region per intersection: the grid cells are numbered region by region
  RegionAssignment a;
  const std::vector<int> region_of_id = {0, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 3, 3, 3, 3, 3, 4, 4, 4, 4, 4, 4};
  for (std::size_t i = 0; i < net.num_cells(); ++i) a.region_of_cell.push_back(region_of_id[net.external_id(static_cast<int>(i))]);
  return a;
}

}  // namespace

TEST(Partition, UnionEqualsCentralOnBundledScenarios) {
  for (const auto& name : oracles::bundled_scenarios()) {
    SCOPED_TRACE(name);
    const auto inst = oracles::load_instance(name);
    const auto central = build_central_system(inst.network, inst.signals, inst.demand);
    expect_union_equals_central(central, partition(inst.network, central, inst.assignment));
  }
}

TEST(Partition, UnionEqualsCentralWithOneRegionPerIntersection) {
  const auto inst = oracles::load_instance("grid2x2");
  const auto central = build_central_system(inst.network, inst.signals, inst.demand);
  const auto subs = partition(inst.network, central, four_regions(inst.network));
  ASSERT_EQ(subs.size(), 4u);
  expect_union_equals_central(central, subs);
}

TEST(Partition, FourCellLinkSharesOnlyTheBoundaryFlow) {
  const auto inst = oracles::load_instance("fig2");
  const auto& net = inst.network;
  const auto central = build_central_system(net, inst.signals, inst.demand);
  const auto subs = partition(net, central, inst.assignment);
  ASSERT_EQ(subs.size(), 2u);
  const int boundary = net.find_link(net.index_of(2), net.index_of(3));
  for (const auto& sp : subs) {
    std::size_t shared_count = 0;
    for (const auto& sv : sp.shared) {
      const auto c = central.layout.decode(sp.global[sv.local]);
      EXPECT_EQ(c.kind, VarKind::Flow);
      EXPECT_EQ(c.entity, boundary);
      ASSERT_EQ(sv.others.size(), 1u);
      EXPECT_EQ(sv.others[0].subproblem, 1 - sp.id);
      EXPECT_EQ(subs[static_cast<std::size_t>(1 - sp.id)].global[sv.others[0].local], sp.global[sv.local]);
      ++shared_count;
    }
    EXPECT_EQ(shared_count, static_cast<std::size_t>(net.flow_steps()) * net.num_ods());
  }
  const auto links = shared_link_set(subs, central.layout);
  ASSERT_EQ(links.size(), 1u);
  EXPECT_EQ(links[0].link, boundary);
  EXPECT_EQ(links[0].owners, (std::vector<int>{0, 1}));
}

TEST(Partition, SharedIffLinkCrossesRegions) {
  const auto inst = oracles::load_instance("grid2x2");
  const auto& net = inst.network;
  const auto central = build_central_system(net, inst.signals, inst.demand);
  const auto assignment = four_regions(net);
  const auto subs = partition(net, central, assignment);
  for (const auto& sp : subs) {
    for (std::size_t j = 0; j < sp.num_vars(); ++j) {
      const auto c = central.layout.decode(sp.global[j]);
      bool crosses = false;
      if (c.kind == VarKind::Flow) {
        const auto& lk = net.link(c.entity);
        crosses = assignment.region_of_cell[static_cast<std::size_t>(lk.tail)] !=
                  assignment.region_of_cell[static_cast<std::size_t>(lk.head)];
      }
      EXPECT_EQ(static_cast<bool>(sp.is_shared[j]), crosses);
    }
  }
}

TEST(Partition, TwoNodeExchangeGraph) {
  const auto inst = oracles::load_instance("fig2");
  const auto central = build_central_system(inst.network, inst.signals, inst.demand);
  const auto g = build_exchange_graph(partition(inst.network, central, inst.assignment));
  ASSERT_EQ(g.size(), 2);
  EXPECT_EQ(g.weight(0, 1), 1.0);
  EXPECT_EQ(g.weight(1, 0), 1.0);
  EXPECT_EQ(g.weight(0, 0), -1.0);
  EXPECT_EQ(g.weight(1, 1), -1.0);
  const auto arcs = g.arcs();
  EXPECT_EQ(arcs.size(), 4u);
  EXPECT_EQ(g.neighbors(0), (std::vector<int>{0, 1}));
}

TEST(Partition, RingExchangeGraphOnFourRegions) {
  const auto inst = oracles::load_instance("grid2x2");
  const auto central = build_central_system(inst.network, inst.signals, inst.demand);
  const auto g = build_exchange_graph(partition(inst.network, central, four_regions(inst.network)));
  ASSERT_EQ(g.size(), 4);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const bool edge = (a + b == 1 || a + b == 5 || (a == 0 && b == 2) || (a == 2 && b == 0) ||
                         (a == 1 && b == 3) || (a == 3 && b == 1));
      if (a == b) {
        EXPECT_EQ(g.weight(a, b), -2.0);
      } else {
        EXPECT_EQ(g.weight(a, b), edge ? 1.0 : 0.0) << a << "," << b;
      }
    }
  }
  EXPECT_NO_THROW(validate_exchange_graph(g, 1.0, 1.0));
}

TEST(Partition, ExchangeGraphChecksFail) {
  ExchangeGraph disconnected(2);
  EXPECT_THROW(validate_exchange_graph(disconnected, 1.0, 1.0), PartitionError);

  ExchangeGraph g(2);
  g.set_weight(0, 1, 1.0);
  g.set_weight(1, 0, 0.5);
  g.set_weight(0, 0, -1.0);
  g.set_weight(1, 1, -0.5);
  EXPECT_THROW(validate_exchange_graph(g, 0.5, 1.0), PartitionError);  // asymmetric

  g.set_weight(1, 0, 1.0);
  g.set_weight(1, 1, -1.0);
  EXPECT_NO_THROW(validate_exchange_graph(g, 1.0, 1.0));
  EXPECT_THROW(validate_exchange_graph(g, 1.5, 2.0), PartitionError);  // below theta

  g.set_weight(1, 1, -0.5);
  EXPECT_THROW(validate_exchange_graph(g, 1.0, 1.0), PartitionError);  // row sum
}

TEST(Partition, WeightRuleOutsideBoundsIsRejected) {
  const auto inst = oracles::load_instance("fig2");
  const auto central = build_central_system(inst.network, inst.signals, inst.demand);
  const auto subs = partition(inst.network, central, inst.assignment);
  WeightRule rule;
  rule.weight = [](int, int) { return 2.0; };
  EXPECT_THROW(build_exchange_graph(subs, rule), PartitionError);
  rule.theta_prime = 2.0;
  const auto g = build_exchange_graph(subs, rule);
  EXPECT_EQ(g.weight(0, 0), -2.0);
}

TEST(Partition, UnassignedCellIsRejected) {
  const auto inst = oracles::load_instance("fig2");
  const auto central = build_central_system(inst.network, inst.signals, inst.demand);
  auto a = inst.assignment;
  a.region_of_cell[2] = std::numeric_limits<int>::min();
  EXPECT_THROW(partition(inst.network, central, a), PartitionError);
  a.region_of_cell.pop_back();
  EXPECT_THROW(partition(inst.network, central, a), PartitionError);
}

TEST(Partition, RegionLabelsMapToAscendingIds) {
  const auto inst = oracles::load_instance("fig2");
  const auto central = build_central_system(inst.network, inst.signals, inst.demand);
  RegionAssignment a{{50, 50, 7, 7}};
  const auto subs = partition(inst.network, central, a);
  ASSERT_EQ(subs.size(), 2u);
  EXPECT_EQ(subs[0].region, 7);
  EXPECT_EQ(subs[1].region, 50);
  EXPECT_EQ(subs[0].cells, (std::vector<int>{2, 3}));
}
