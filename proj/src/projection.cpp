#include "sodta/projection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sodta {

void ProjectionWorkspace::reset(const ConstraintSystem& system) {
  row_duals.assign(system.num_rows(), 0.0);
  bound_duals.assign(system.num_vars(), 0.0);
  last_sweeps = 0;
  last_residual = 0.0;
}

namespace {

// x = target - A^T lambda + mu
void primal_from_duals(std::span<const double> target, const ConstraintSystem& sys, const ProjectionWorkspace& ws,
                       std::vector<double>& x) {
  x.assign(target.begin(), target.end());
  for (std::size_t r = 0; r < sys.num_rows(); ++r) {
    const double lam = ws.row_duals[r];
    if (lam == 0.0) continue;
    const auto idx = sys.row_indices(r);
    const auto val = sys.row_values(r);
    for (std::size_t p = 0; p < idx.size(); ++p) x[idx[p]] -= lam * val[p];
  }
  for (std::size_t j = 0; j < x.size(); ++j) x[j] += ws.bound_duals[j];
}

double solver_residual(const ConstraintSystem& sys, const ProjectionWorkspace& ws, std::span<const double> x) {
  double res = 0.0;
  for (std::size_t r = 0; r < sys.num_rows(); ++r) {
    const double v = sys.row_activity(r, x) - sys.rhs(r);
    if (sys.relation(r) == Relation::Equal) {
      res = std::max(res, std::abs(v));
    } else {
      res = std::max(res, std::max(0.0, v));
      res = std::max(res, std::min(ws.row_duals[r], std::max(0.0, -v)));
    }
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    res = std::max(res, std::max(0.0, -x[j]));
    res = std::max(res, std::min(ws.bound_duals[j], std::max(0.0, x[j])));
  }
  return res;
}

}  // namespace

std::vector<double> project(std::span<const double> target, const ConstraintSystem& system,
                            ProjectionWorkspace& workspace) {
  if (target.size() != system.num_vars()) throw FormulationError("projection target dimension mismatch");
  if (!(workspace.tolerance > 0.0)) throw FormulationError("projection tolerance must be positive");
  if (!(workspace.relaxation > 0.0 && workspace.relaxation < 2.0)) {
    throw FormulationError("projection relaxation must lie in (0, 2)");
  }
  const double omega = workspace.relaxation;
  if (workspace.row_duals.size() != system.num_rows() || workspace.bound_duals.size() != system.num_vars()) {
    workspace.reset(system);
  }
  const std::size_t m = system.num_rows();
  std::vector<double> inv_norm2(m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    double s = 0.0;
    for (double a : system.row_values(r)) s += a * a;
    inv_norm2[r] = s > 0.0 ? 1.0 / s : 0.0;
  }

  auto& lam = workspace.row_duals;
  auto& mu = workspace.bound_duals;
  std::vector<double> x;
  primal_from_duals(target, system, workspace, x);
  double residual = solver_residual(system, workspace, x);
  std::size_t sweep = 0;
  while (residual > workspace.tolerance) {
    if (sweep == workspace.max_sweeps) {
      workspace.last_sweeps = sweep;
      workspace.last_residual = residual;
      throw ProjectionError("projection did not converge in " + std::to_string(sweep) + " sweeps (KKT residual " +
                                std::to_string(residual) + ")",
                            residual, sweep);
    }
    ++sweep;
    for (std::size_t r = 0; r < m; ++r) {
      if (inv_norm2[r] == 0.0) continue;
      const auto idx = system.row_indices(r);
      const auto val = system.row_values(r);
      double act = 0.0;
      for (std::size_t p = 0; p < idx.size(); ++p) act += val[p] * x[idx[p]];
      double step = omega * (act - system.rhs(r)) * inv_norm2[r];
      if (system.relation(r) == Relation::LessEqual) step = std::max(step, -lam[r]);
      if (step == 0.0) continue;
      lam[r] += step;
      for (std::size_t p = 0; p < idx.size(); ++p) x[idx[p]] -= step * val[p];
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double step = std::max(-x[j], -mu[j]);
      mu[j] += step;
      x[j] += step;
    }
    if (sweep % 256 == 0) primal_from_duals(target, system, workspace, x);
    residual = solver_residual(system, workspace, x);
  }
  primal_from_duals(target, system, workspace, x);
  workspace.last_sweeps = sweep;
  workspace.last_residual = solver_residual(system, workspace, x);
  return x;
}

double kkt_residual(std::span<const double> target, std::span<const double> point, std::span<const double> row_duals,
                    const ConstraintSystem& system) {
  if (target.size() != system.num_vars() || point.size() != system.num_vars() ||
      row_duals.size() != system.num_rows()) {
    throw FormulationError("KKT residual dimension mismatch");
  }
  std::vector<double> grad(point.size());
  for (std::size_t j = 0; j < point.size(); ++j) grad[j] = point[j] - target[j];
  double res = 0.0;
  for (std::size_t r = 0; r < system.num_rows(); ++r) {
    const auto idx = system.row_indices(r);
    const auto val = system.row_values(r);
    for (std::size_t p = 0; p < idx.size(); ++p) grad[idx[p]] += row_duals[r] * val[p];
    const double v = system.row_activity(r, point) - system.rhs(r);
    if (system.relation(r) == Relation::Equal) {
      res = std::max(res, std::abs(v));
    } else {
      res = std::max(res, std::max(0.0, v));
      res = std::max(res, std::max(0.0, -row_duals[r]));
      res = std::max(res, std::min(std::max(0.0, row_duals[r]), std::max(0.0, -v)));
    }
  }
  // grad now holds the implied bound multipliers mu
  for (std::size_t j = 0; j < point.size(); ++j) {
    res = std::max(res, std::max(0.0, -point[j]));
    res = std::max(res, std::max(0.0, -grad[j]));
    res = std::max(res, std::min(std::max(0.0, grad[j]), std::max(0.0, point[j])));
  }
  return res;
}

}  // namespace sodta
