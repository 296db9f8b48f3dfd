#ifndef SODTA_DGA_HPP_
#define SODTA_DGA_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sodta/ctm.hpp"
#include "sodta/formulation.hpp"
#include "sodta/network.hpp"
#include "sodta/partition.hpp"
#include "sodta/projection.hpp"

namespace sodta {

/// Diminishing step sizes alpha^k = a / k^p (consensus) and
/// gamma^k = g / k^q (gradient), k >= 1.
struct StepSchedule {
  std::string name = "power";
  double alpha_scale = 1.0;
  double alpha_exponent = 0.55;
  double gamma_scale = 1.0;
  double gamma_exponent = 1.0;

  double alpha(std::size_t k) const;
  double gamma(std::size_t k) const;

  /// Checks the five summability conditions on the step sizes analytically
  /// for the power family: 1/2 < p, q <= 1 and 2q - p > 1. Throws
  /// std::invalid_argument naming the failed condition.
  void validate() const;
};

struct SolverConfig {
  double epsilon = 0.5;
  std::size_t max_iters = 5000;
  StepSchedule schedule;
  WeightRule weights;
  double projection_tolerance = 1e-6;
  std::size_t max_sweeps = 10000;
  std::size_t checkpoint_interval = 0;
  std::uint64_t seed = 0;  // reserved for test-data generators; the solver is deterministic
  bool parallel = true;
};

/// Everything the distributed solver needs that does not change across
/// iterations.
class DistributedProblem {
 public:
  DistributedProblem(Network network, SignalSchedule signals, DemandProfile demand,
                     const RegionAssignment& assignment, const WeightRule& weights = {});
  /// Custom split (tests): sub-problems and graph supplied by the caller.
  DistributedProblem(Network network, SignalSchedule signals, DemandProfile demand, CentralProblem central,
                     std::vector<SubProblem> subproblems, ExchangeGraph graph);

  const Network& network() const { return network_; }
  const SignalSchedule& signals() const { return signals_; }
  const DemandProfile& demand() const { return demand_; }
  const CentralProblem& central() const { return central_; }
  const std::vector<SubProblem>& subproblems() const { return subs_; }
  const SubProblem& subproblem(int s) const { return subs_[static_cast<std::size_t>(s)]; }
  const ExchangeGraph& graph() const { return graph_; }
  const std::vector<SharedLink>& shared_links() const { return shared_links_; }
  /// max(M_i, M_j) per link with unbounded ends ignored (1 if both unbounded).
  std::span<const double> link_scale() const { return link_scale_; }
  std::size_t num_subproblems() const { return subs_.size(); }

 private:
  void finish();

  Network network_;
  SignalSchedule signals_;
  DemandProfile demand_;
  CentralProblem central_;
  std::vector<SubProblem> subs_;
  ExchangeGraph graph_;
  std::vector<SharedLink> shared_links_;
  std::vector<double> link_scale_;
};

struct SubproblemState {
  std::vector<double> values;  // X_s^k in the sub-problem's local index space
  ProjectionWorkspace workspace;
  bool frozen = false;
  double disagreement = 0.0;
  double objective = 0.0;
  double wall_ms = 0.0;
};

struct IterationState {
  std::size_t k = 0;
  std::vector<SubproblemState> subs;
};

enum class TerminationReason { Converged, MaxIterations };
const char* to_string(TerminationReason reason);

struct TraceRow {
  std::size_t iter = 0;
  int subproblem = 0;
  double objective = 0.0;
  double disagreement = 0.0;
  double wall_ms = 0.0;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  std::vector<double> total_objective;  // per iteration, sum of sub-problem objectives
  std::vector<double> solution;         // central layout, shared copies averaged
  TerminationReason reason = TerminationReason::MaxIterations;
  std::size_t iterations = 0;
  IterationState final_state;
};

/// Gradient of the sub-problem's linear objective slice: tau on its
/// non-sink occupancy variables, zero elsewhere.
std::vector<double> gradient(const SubProblem& subproblem);

/// Auxiliary point for iteration k+1 from the k-snapshot: exclusive entries
/// take a gradient step; shared entries also add alpha^{k+1} times the
/// weighted sum of all copies, the own copy weighted by minus the sum of the
/// co-owners' weights.
std::vector<double> consensus_gradient_step(const IterationState& state, const SubProblem& subproblem,
                                            const ExchangeGraph& graph, const StepSchedule& schedule);

/// Capacity-normalised absolute disagreement of the sub-problem's boundary
/// flow copies against every co-owner, summed over links, t and OD.
double disagreement(const IterationState& state, const SubProblem& subproblem, const VariableLayout& layout,
                    std::span<const double> link_scale);

/// One synchronous iteration k -> k+1. Every non-frozen sub-problem reads
/// only the k-snapshot, so the result does not depend on execution order.
IterationState superstep(const IterationState& state, const DistributedProblem& problem,
                         const SolverConfig& config);
/// Plain loop over sub-problems; the reference the OpenMP path is tested against.
IterationState superstep_serial(const IterationState& state, const DistributedProblem& problem,
                                const SolverConfig& config);
/// OpenMP parallel-for over sub-problems with a barrier at the end.
IterationState superstep_parallel(const IterationState& state, const DistributedProblem& problem,
                                  const SolverConfig& config);

/// Iteration-0 state from the shortest-path CTM simulation.
IterationState initial_state(const DistributedProblem& problem, const SolverConfig& config);
/// Iteration-0 state from a central-layout warm start.
IterationState initial_state(const DistributedProblem& problem, const SolverConfig& config,
                             std::span<const double> warm_start);

/// Central-layout point with each variable averaged over its copies.
std::vector<double> assemble_solution(const DistributedProblem& problem, const IterationState& state);

using IterationObserver = std::function<void(const IterationState&)>;

/// Iterates supersteps from state until every sub-problem's disagreement is
/// at most epsilon or max_iters is reached. A sub-problem within epsilon is
/// frozen (keeps its values) and resumes if its disagreement grows again.
RunTrace run(const DistributedProblem& problem, const SolverConfig& config, IterationState state,
             const IterationObserver& observer = {});
RunTrace run(const DistributedProblem& problem, const SolverConfig& config);

/// Nonlinear CTM re-simulation of a central-layout solution, routing by its
/// flow split ratios. Removes holding back.
SimTrace post_simulate(const DistributedProblem& problem, std::span<const double> solution);

}  // namespace sodta

#endif  // SODTA_DGA_HPP_
