#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "sodta/simplex.hpp"

using namespace sodta;

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST(Simplex, MatchesVertexEnumeration) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto lp = oracles::random_feasible_lp(rng, 12);
    const auto oracle = oracles::enumerate_vertices(lp.system, lp.cost);
    ASSERT_TRUE(oracle.has_value()) << "trial " << trial;
    const auto res = solve_lp(lp.system, lp.cost);
    ASSERT_EQ(res.status, LpStatus::Optimal) << "trial " << trial;
    EXPECT_LE(std::abs(res.objective - oracle->objective), 1e-9) << "trial " << trial;
    EXPECT_TRUE(check_feasibility(lp.system, res.x, 1e-9).feasible());
    EXPECT_LE(duality_gap(lp.system, lp.cost, res), 1e-9);
    EXPECT_LE(complementarity_violation(lp.system, lp.cost, res), 1e-9);
  }
}

TEST(Simplex, ChainOptimumIsTwo) {
  const auto inst = oracles::load_instance("chain3");
  const auto central = build_central_system(inst.network, inst.signals, inst.demand);
  const auto res = solve_central(central.system, central.objective);
  ASSERT_EQ(res.status, LpStatus::Optimal);
  EXPECT_NEAR(res.objective, 2.0, 1e-9);
  EXPECT_LE(duality_gap(central.system, central.objective.coefficients, res), 1e-7);
  const auto& L = central.layout;
  EXPECT_NEAR(res.x[L.occupancy(0, 0, 0)], 1.0, 1e-9);
  EXPECT_NEAR(res.x[L.occupancy(1, 1, 0)], 1.0, 1e-9);
}

TEST(Simplex, TwoStepChainHandExample) {
  // source -> sink, F = 1, two slots, three vehicles: one leaves after slot 0, so 3 + 2 = 5
  std::vector<Cell> cells = {{1, CellKind::Source, 0.0, 1.0}, {2, CellKind::Sink, 0.0, 1.0}};
  const auto net = build_network(cells, {{1, 2}}, 1.0, 1.0, 2, {{1, 2}});
  DemandProfile d;
  d.entries = {{0, 0, 0, 3.0}};
  const auto central = build_central_system(net, SignalSchedule::always_green(net), d);
  const auto res = solve_central(central.system, central.objective);
  ASSERT_EQ(res.status, LpStatus::Optimal);
  EXPECT_NEAR(res.objective, 5.0, 1e-9);
}

TEST(Simplex, DetectsInfeasibilityWithCertificate) {
  ConstraintSystem sys(2);
  sys.add_row(std::vector<std::size_t>{0, 1}, std::vector<double>{1.0, 1.0}, Relation::LessEqual, 1.0, RowTag{});
  sys.add_row(std::vector<std::size_t>{0}, std::vector<double>{1.0}, Relation::Equal, 2.0, RowTag{});
  const std::vector<double> cost = {1.0, 1.0};
  const auto res = solve_lp(sys, cost);
  ASSERT_EQ(res.status, LpStatus::Infeasible);
  ASSERT_EQ(res.farkas.size(), 2u);
  // y^T A <= 0 columnwise, y.b > 0, y <= 0 on the <= row
  double yb = 0.0;
  std::vector<double> ya(2, 0.0);
  for (std::size_t r = 0; r < sys.num_rows(); ++r) {
    yb += res.farkas[r] * sys.rhs(r);
    const auto idx = sys.row_indices(r);
    const auto val = sys.row_values(r);
    for (std::size_t p = 0; p < idx.size(); ++p) ya[idx[p]] += res.farkas[r] * val[p];
  }
  EXPECT_GT(yb, 1e-9);
  EXPECT_LE(ya[0], 1e-12);
  EXPECT_LE(ya[1], 1e-12);
  EXPECT_LE(res.farkas[0], 1e-12);
}

TEST(Simplex, DetectsUnboundedness) {
  ConstraintSystem sys(2);
  sys.add_row(std::vector<std::size_t>{0, 1}, std::vector<double>{1.0, -1.0}, Relation::LessEqual, 1.0, RowTag{});
  const std::vector<double> cost = {-1.0, 0.0};
  EXPECT_EQ(solve_lp(sys, cost).status, LpStatus::Unbounded);
}

TEST(Simplex, DegenerateProblemTerminates) {
  // many constraints tight at the origin
  ConstraintSystem sys(3);
  for (int r = 0; r < 6; ++r) {
    sys.add_row(std::vector<std::size_t>{0, 1, 2},
                std::vector<double>{1.0 + r, -1.0 + 0.5 * r, 1.0 - 0.25 * r}, Relation::LessEqual, 0.0, RowTag{});
  }
  sys.add_row(std::vector<std::size_t>{0, 1, 2}, std::vector<double>{1.0, 1.0, 1.0}, Relation::LessEqual, 1.0,
              RowTag{});
  const std::vector<double> cost = {-1.0, -1.0, -1.0};
  const auto res = solve_lp(sys, cost);
  const auto oracle = oracles::enumerate_vertices(sys, cost);
  ASSERT_EQ(res.status, LpStatus::Optimal);
  EXPECT_NEAR(res.objective, oracle->objective, 1e-9);
}

TEST(Simplex, CyclingGuardThrows) {
  std::mt19937_64 rng(3);
  const auto lp = oracles::random_feasible_lp(rng, 8);
  SimplexOptions opts;
  opts.max_iterations = 1;
  EXPECT_THROW(solve_lp(lp.system, lp.cost, opts), OracleError);
}

TEST(Simplex, DualsSatisfyStrongDualityOnBundledScenarios) {
  for (const auto& name : {"fig2", "chain3"}) {
    const auto inst = oracles::load_instance(name);
    const auto central = build_central_system(inst.network, inst.signals, inst.demand);
    const auto res = solve_central(central.system, central.objective);
    ASSERT_EQ(res.status, LpStatus::Optimal);
    EXPECT_LE(duality_gap(central.system, central.objective.coefficients, res), 1e-7) << name;
    EXPECT_LE(max_abs(std::vector<double>{complementarity_violation(central.system, central.objective.coefficients, res)}),
              1e-7);
  }
}

TEST(Simplex, OptimalityGapArithmetic) {
  EXPECT_NEAR(optimality_gap(197.34, 187.06), 5.4955, 1e-4);
  EXPECT_NEAR(optimality_gap(524.84, 499.85), 4.9995, 1e-4);
  EXPECT_DOUBLE_EQ(optimality_gap(110.0, 100.0), 10.000000000000002);
  EXPECT_THROW(optimality_gap(1.0, 0.0), std::domain_error);
}
