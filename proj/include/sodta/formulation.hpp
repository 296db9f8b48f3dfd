#ifndef SODTA_FORMULATION_HPP_
#define SODTA_FORMULATION_HPP_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sodta/layout.hpp"
#include "sodta/network.hpp"

namespace sodta {

enum class Relation { Equal, LessEqual };

/// The constraint template a row was generated from.
enum class RowKind {
  Conservation,        // ordinary / intersection / diverge cells
  SourceConservation,  // demand on the rhs
  SinkConservation,
  OutflowOccupancy,    // per-OD outflow <= occupancy
  OutflowSaturation,   // aggregate outflow <= F_i
  InflowSaturation,    // aggregate inflow <= F_j
  InflowCapacity,      // aggregate inflow <= delta (M_j - x_j)
  SignalOutflow,       // aggregate outflow <= g F at intersections
};

const char* to_string(RowKind kind);

struct RowTag {
  RowKind kind = RowKind::Conservation;
  int cell = 0;  // the cell the row is indexed by
  int t = 0;
  int od = -1;  // -1 for rows aggregated over ODs
  friend bool operator==(const RowTag&, const RowTag&) = default;
};

class FormulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sparse linear rows (CSR) over a variable index space with x >= 0 bounds.
class ConstraintSystem {
 public:
  explicit ConstraintSystem(std::size_t num_vars = 0) : num_vars_(num_vars) {}

  void add_row(std::span<const std::size_t> indices, std::span<const double> coefficients, Relation relation,
               double rhs, RowTag tag);

  std::size_t num_vars() const { return num_vars_; }
  std::size_t num_rows() const { return rhs_.size(); }
  std::size_t num_nonzeros() const { return cols_.size(); }

  std::span<const std::size_t> row_indices(std::size_t r) const {
    return std::span<const std::size_t>(cols_).subspan(start_[r], start_[r + 1] - start_[r]);
  }
  std::span<const double> row_values(std::size_t r) const {
    return std::span<const double>(vals_).subspan(start_[r], start_[r + 1] - start_[r]);
  }
  Relation relation(std::size_t r) const { return relation_[r]; }
  double rhs(std::size_t r) const { return rhs_[r]; }
  const RowTag& tag(std::size_t r) const { return tags_[r]; }

  /// a_r . values
  double row_activity(std::size_t r, std::span<const double> values) const;
  /// Positive amount by which row r is violated at values (0 if satisfied).
  double row_violation(std::size_t r, std::span<const double> values) const;

 private:
  std::size_t num_vars_;
  std::vector<std::size_t> start_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> vals_;
  std::vector<Relation> relation_;
  std::vector<double> rhs_;
  std::vector<RowTag> tags_;
};

struct LinearObjective {
  std::vector<double> coefficients;
};

struct CentralProblem {
  VariableLayout layout;
  ConstraintSystem system;
  LinearObjective objective;
};

/// The full time-expanded LP: conservation, flow limits, signal gating and
/// nonnegativity, minimising tau * (non-sink occupancy).
CentralProblem build_central_system(const Network& network, const SignalSchedule& signals,
                                    const DemandProfile& demand);

struct FeasibilityReport {
  struct Violation {
    bool is_bound = false;  // false: constraint row, true: x >= 0
    std::size_t index = 0;  // row or variable index
    double amount = 0.0;
  };
  std::vector<Violation> violations;
  double max_violation = 0.0;
  bool feasible() const { return violations.empty(); }
};

FeasibilityReport check_feasibility(const ConstraintSystem& system, std::span<const double> values, double tol);

double evaluate_objective(const LinearObjective& objective, std::span<const double> values);

}  // namespace sodta

#endif  // SODTA_FORMULATION_HPP_
