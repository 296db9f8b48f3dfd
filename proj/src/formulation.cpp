#include "sodta/formulation.hpp"

#include <algorithm>
#include <cmath>

namespace sodta {

const char* to_string(RowKind kind) {
  switch (kind) {
    case RowKind::Conservation: return "conservation";
    case RowKind::SourceConservation: return "source_conservation";
    case RowKind::SinkConservation: return "sink_conservation";
    case RowKind::OutflowOccupancy: return "outflow_occupancy";
    case RowKind::OutflowSaturation: return "outflow_saturation";
    case RowKind::InflowSaturation: return "inflow_saturation";
    case RowKind::InflowCapacity: return "inflow_capacity";
    case RowKind::SignalOutflow: return "signal_outflow";
  }
  return "?";
}

void ConstraintSystem::add_row(std::span<const std::size_t> indices, std::span<const double> coefficients,
                               Relation relation, double rhs, RowTag tag) {
  if (indices.size() != coefficients.size()) throw FormulationError("row index/coefficient length mismatch");
  for (auto idx : indices) {
    if (idx >= num_vars_) throw FormulationError("row references variable beyond the index space");
  }
  cols_.insert(cols_.end(), indices.begin(), indices.end());
  vals_.insert(vals_.end(), coefficients.begin(), coefficients.end());
  start_.push_back(cols_.size());
  relation_.push_back(relation);
  rhs_.push_back(rhs);
  tags_.push_back(tag);
}

double ConstraintSystem::row_activity(std::size_t r, std::span<const double> values) const {
  double s = 0.0;
  for (std::size_t p = start_[r]; p < start_[r + 1]; ++p) s += vals_[p] * values[cols_[p]];
  return s;
}

double ConstraintSystem::row_violation(std::size_t r, std::span<const double> values) const {
  const double v = row_activity(r, values) - rhs_[r];
  return relation_[r] == Relation::Equal ? std::abs(v) : std::max(0.0, v);
}

namespace {

class RowBuilder {
 public:
  void add(std::size_t index, double coefficient) {
    idx_.push_back(index);
    val_.push_back(coefficient);
  }
  void emit(ConstraintSystem& sys, Relation rel, double rhs, RowTag tag) {
    sys.add_row(idx_, val_, rel, rhs, tag);
    idx_.clear();
    val_.clear();
  }

 private:
  std::vector<std::size_t> idx_;
  std::vector<double> val_;
};

}  // namespace

CentralProblem build_central_system(const Network& network, const SignalSchedule& signals,
                                    const DemandProfile& demand) {
  if (network.horizon() < 1) throw FormulationError("horizon must be at least 1");
  if (network.num_ods() == 0) throw FormulationError("OD set is empty");

  CentralProblem p{VariableLayout(network), ConstraintSystem(), LinearObjective()};
  const auto& L = p.layout;
  p.system = ConstraintSystem(L.size());
  const int T = network.horizon();
  const int steps = network.flow_steps();
  const int K = static_cast<int>(network.num_ods());
  const int n = static_cast<int>(network.num_cells());
  const auto D = demand.table(network);
  auto demand_at = [&](int i, int t, int k) {
    return D[(static_cast<std::size_t>(i) * static_cast<std::size_t>(T) + static_cast<std::size_t>(t)) *
                 static_cast<std::size_t>(K) + static_cast<std::size_t>(k)];
  };
  RowBuilder row;

  // Conservation. Slot 0 is the empty-network initial condition with the
  // first demand already loaded at the origin.
  for (int i = 0; i < n; ++i) {
    RowKind kind = network.is_source(i) ? RowKind::SourceConservation
                   : network.is_sink(i) ? RowKind::SinkConservation
                                        : RowKind::Conservation;
    for (int t = 0; t < T; ++t) {
      for (int k = 0; k < K; ++k) {
        row.add(L.occupancy(i, t, k), 1.0);
        if (t > 0) {
          row.add(L.occupancy(i, t - 1, k), -1.0);
          for (int l : network.in_links(i)) row.add(L.flow(l, t - 1, k), -1.0);
          for (int l : network.out_links(i)) row.add(L.flow(l, t - 1, k), 1.0);
        }
        const double rhs = network.is_source(i) ? demand_at(i, t, k) : 0.0;
        row.emit(p.system, Relation::Equal, rhs, {kind, i, t, k});
      }
    }
  }

  // Per-OD outflow bounded by occupancy.
  for (int i = 0; i < n; ++i) {
    if (network.out_links(i).empty()) continue;
    for (int t = 0; t < steps; ++t) {
      for (int k = 0; k < K; ++k) {
        for (int l : network.out_links(i)) row.add(L.flow(l, t, k), 1.0);
        row.add(L.occupancy(i, t, k), -1.0);
        row.emit(p.system, Relation::LessEqual, 0.0, {RowKind::OutflowOccupancy, i, t, k});
      }
    }
  }

  // Aggregate outflow <= F_i.
  for (int i = 0; i < n; ++i) {
    if (network.out_links(i).empty()) continue;
    for (int t = 0; t < steps; ++t) {
      for (int k = 0; k < K; ++k) {
        for (int l : network.out_links(i)) row.add(L.flow(l, t, k), 1.0);
      }
      row.emit(p.system, Relation::LessEqual, network.cell(i).sat_flow, {RowKind::OutflowSaturation, i, t, -1});
    }
  }

  // Aggregate inflow <= F_j.
  for (int j = 0; j < n; ++j) {
    if (network.in_links(j).empty()) continue;
    for (int t = 0; t < steps; ++t) {
      for (int k = 0; k < K; ++k) {
        for (int l : network.in_links(j)) row.add(L.flow(l, t, k), 1.0);
      }
      row.emit(p.system, Relation::LessEqual, network.cell(j).sat_flow, {RowKind::InflowSaturation, j, t, -1});
    }
  }

  // Aggregate inflow <= delta (M_j - sum_od x_j), written with x on the left.
  const double delta = network.delta();
  for (int j = 0; j < n; ++j) {
    if (network.in_links(j).empty() || network.is_sink(j)) continue;
    for (int t = 0; t < steps; ++t) {
      for (int k = 0; k < K; ++k) {
        for (int l : network.in_links(j)) row.add(L.flow(l, t, k), 1.0);
      }
      for (int k = 0; k < K; ++k) row.add(L.occupancy(j, t, k), delta);
      row.emit(p.system, Relation::LessEqual, delta * network.cell(j).max_occupancy,
               {RowKind::InflowCapacity, j, t, -1});
    }
  }

  // Signal-gated outflow at intersection cells.
  for (int i = 0; i < n; ++i) {
    if (!network.is_intersection(i) || network.out_links(i).empty()) continue;
    for (int t = 0; t < steps; ++t) {
      for (int k = 0; k < K; ++k) {
        for (int l : network.out_links(i)) row.add(L.flow(l, t, k), 1.0);
      }
      row.emit(p.system, Relation::LessEqual, effective_sat_flow(network, signals, i, t),
               {RowKind::SignalOutflow, i, t, -1});
    }
  }

  p.objective.coefficients.assign(L.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    if (network.is_sink(i)) continue;
    for (int t = 0; t < T; ++t) {
      for (int k = 0; k < K; ++k) p.objective.coefficients[L.occupancy(i, t, k)] = network.tau();
    }
  }
  return p;
}

FeasibilityReport check_feasibility(const ConstraintSystem& system, std::span<const double> values, double tol) {
  if (values.size() != system.num_vars()) throw FormulationError("value vector dimension does not match the system");
  FeasibilityReport report;
  for (std::size_t r = 0; r < system.num_rows(); ++r) {
    const double v = system.row_violation(r, values);
    report.max_violation = std::max(report.max_violation, v);
    if (v > tol) report.violations.push_back({false, r, v});
  }
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double v = std::max(0.0, -values[j]);
    report.max_violation = std::max(report.max_violation, v);
    if (v > tol) report.violations.push_back({true, j, v});
  }
  return report;
}

double evaluate_objective(const LinearObjective& objective, std::span<const double> values) {
  if (values.size() != objective.coefficients.size()) {
    throw FormulationError("value vector dimension does not match the objective");
  }
  double s = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) s += objective.coefficients[j] * values[j];
  return s;
}

}  // namespace sodta
