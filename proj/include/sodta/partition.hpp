#ifndef SODTA_PARTITION_HPP_
#define SODTA_PARTITION_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sodta/formulation.hpp"
#include "sodta/network.hpp"

namespace sodta {

class PartitionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Region label per dense cell index. Labels are arbitrary integers; the
/// sub-problem ids are the labels' ascending rank.
struct RegionAssignment {
  std::vector<int> region_of_cell;
};

struct CoOwner {
  int subproblem = 0;
  std::size_t local = 0;  // index in that sub-problem's local space
};

/// A variable carried by more than one sub-problem.
struct SharedVariable {
  std::size_t local = 0;
  std::vector<CoOwner> others;  // every co-owner except this sub-problem
};

struct SubProblem {
  int id = 0;
  int region = 0;                      // label from the assignment (or id for custom splits)
  std::vector<int> cells;              // dense cells owned by this region
  std::vector<std::size_t> global;     // local -> central index, ascending
  ConstraintSystem system;             // rows in local indices
  std::vector<std::size_t> row_origin; // local row -> central row
  std::vector<double> objective;       // local slice of the central objective
  std::vector<SharedVariable> shared;  // ascending by local index
  std::vector<char> is_shared;         // per local index

  std::size_t num_vars() const { return global.size(); }
};

/// Row owner per central row and objective owner per central variable;
/// owner ids are 0..num_subproblems-1.
std::vector<SubProblem> partition_by_owner(const CentralProblem& central, std::span<const int> row_owner,
                                           std::span<const int> objective_owner, int num_subproblems);

/// Intersection-level split: every row goes to the region of the cell it is
/// indexed by, every objective term to the region of its occupancy cell.
std::vector<SubProblem> partition(const Network& network, const CentralProblem& central,
                                  const RegionAssignment& assignment);

struct WeightRule {
  std::string name = "unit";
  double theta = 1.0;        // lower bound on off-diagonal weights
  double theta_prime = 1.0;  // upper bound
  /// Weight on arc (from, to), s != s'. Empty means unit weights.
  std::function<double(int from, int to)> weight;
};

/// Sub-problem nodes with weighted arcs, self-arcs included. weight(a, b) is
/// w_ab, the weight applied to information from a used by b.
class ExchangeGraph {
 public:
  ExchangeGraph() = default;
  explicit ExchangeGraph(int n) : n_(n), w_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0) {}
  int size() const { return n_; }
  double weight(int from, int to) const { return w_[static_cast<std::size_t>(from * n_ + to)]; }
  void set_weight(int from, int to, double w) { w_[static_cast<std::size_t>(from * n_ + to)] = w; }
  bool has_arc(int from, int to) const { return from == to || weight(from, to) != 0.0; }
  /// n^s: sub-problems with a nonzero weight into s, plus s itself, ascending.
  std::vector<int> neighbors(int s) const;
  std::vector<std::pair<int, int>> arcs() const;

 private:
  int n_ = 0;
  std::vector<double> w_;
};

/// Arcs between sub-problems that share a variable plus self-arcs, weighted
/// per the rule, self-weights set to minus the row sum. Throws PartitionError
/// if the result violates validate_exchange_graph.
ExchangeGraph build_exchange_graph(const std::vector<SubProblem>& subproblems, const WeightRule& rule = {});

/// Connectivity, symmetry, theta bounds on nonzero off-diagonal weights and
/// zero row sums. Throws PartitionError naming the first failed condition.
void validate_exchange_graph(const ExchangeGraph& graph, double theta, double theta_prime);

struct SharedLink {
  int link = 0;
  std::vector<int> owners;  // ascending sub-problem ids
};

/// Every link whose flow variables are carried by more than one sub-problem.
std::vector<SharedLink> shared_link_set(const std::vector<SubProblem>& subproblems, const VariableLayout& layout);

}  // namespace sodta

#endif  // SODTA_PARTITION_HPP_
