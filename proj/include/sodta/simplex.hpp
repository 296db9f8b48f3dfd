#ifndef SODTA_SIMPLEX_HPP_
#define SODTA_SIMPLEX_HPP_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "sodta/formulation.hpp"

namespace sodta {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Optimal;
  double objective = 0.0;
  std::vector<double> x;       // structural values, >= 0
  std::vector<double> duals;   // one per row, sign convention of min c.x s.t. rows
  std::vector<double> farkas;  // infeasibility certificate, see solve_lp
  std::size_t iterations = 0;
};

struct SimplexOptions {
  std::size_t max_iterations = 2'000'000;  // cycling guard
  double pivot_tolerance = 1e-9;
  double cost_tolerance = 1e-9;
  double feasibility_tolerance = 1e-9;
  std::size_t refresh_interval = 50;     // recompute basic values and prices
  std::size_t reinvert_interval = 2000;  // refactor the basis from scratch
};

/// Dense revised simplex with Bland's rule, two phases (no big-M), for
///   min cost.x  s.t.  rows of system, x >= 0.
/// For an infeasible system, farkas holds row multipliers y with
/// y_r <= 0 on <= rows, y^T A <= 0 columnwise and y.b > 0.
LpResult solve_lp(const ConstraintSystem& system, std::span<const double> cost, const SimplexOptions& options = {});

LpResult solve_central(const ConstraintSystem& system, const LinearObjective& objective,
                       const SimplexOptions& options = {});

/// |c.x - b.y| for an optimal (x, y) pair.
double duality_gap(const ConstraintSystem& system, std::span<const double> cost, const LpResult& result);

/// Largest complementary-slackness product over rows (y_r * slack_r) and
/// columns (reduced cost_j * x_j).
double complementarity_violation(const ConstraintSystem& system, std::span<const double> cost,
                                 const LpResult& result);

/// 100 (dga - oracle) / oracle. Throws std::domain_error when oracle is 0.
double optimality_gap(double dga_objective, double oracle_objective);

}  // namespace sodta

#endif  // SODTA_SIMPLEX_HPP_
