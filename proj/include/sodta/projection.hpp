#ifndef SODTA_PROJECTION_HPP_
#define SODTA_PROJECTION_HPP_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "sodta/formulation.hpp"

namespace sodta {

class ProjectionError : public std::runtime_error {
 public:
  ProjectionError(const std::string& what, double residual, std::size_t sweeps)
      : std::runtime_error(what), residual_(residual), sweeps_(sweeps) {}
  double residual() const { return residual_; }
  std::size_t sweeps() const { return sweeps_; }

 private:
  double residual_;
  std::size_t sweeps_;
};

/// Dual state of the row-action projector. Multipliers persist between
/// calls so consecutive projections of nearby points start warm.
struct ProjectionWorkspace {
  std::vector<double> row_duals;    // >= 0 on inequality rows, free on equalities
  std::vector<double> bound_duals;  // >= 0, one per variable (x >= 0)
  double tolerance = 1e-6;
  std::size_t max_sweeps = 10000;
  double relaxation = 1.5;  // over-relaxed dual steps, 0 < omega < 2

  // diagnostics of the last call
  std::size_t last_sweeps = 0;
  double last_residual = 0.0;

  void reset(const ConstraintSystem& system);
};

/// Euclidean projection of target onto {x >= 0 : rows of system} by cyclic
/// dual coordinate ascent (Hildreth). Returns once the KKT residual is at
/// most workspace.tolerance; throws ProjectionError after max_sweeps.
std::vector<double> project(std::span<const double> target, const ConstraintSystem& system,
                            ProjectionWorkspace& workspace);

/// Largest of primal infeasibility, dual infeasibility and complementarity
/// violation of (point, row duals) for min 1/2 |x - target|^2 over the
/// system. Bound multipliers are implied by stationarity:
/// mu = point - target + A^T row_duals.
double kkt_residual(std::span<const double> target, std::span<const double> point,
                    std::span<const double> row_duals, const ConstraintSystem& system);

}  // namespace sodta

#endif  // SODTA_PROJECTION_HPP_
