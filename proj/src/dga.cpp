#include "sodta/dga.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sodta {

double StepSchedule::alpha(std::size_t k) const {
  return alpha_scale / std::pow(static_cast<double>(k), alpha_exponent);
}

double StepSchedule::gamma(std::size_t k) const {
  return gamma_scale / std::pow(static_cast<double>(k), gamma_exponent);
}

void StepSchedule::validate() const {
  if (!(alpha_scale > 0.0) || !(gamma_scale > 0.0)) throw std::invalid_argument("step scales must be positive");
  const double p = alpha_exponent, q = gamma_exponent;
  // sum alpha = sum gamma = inf
  if (p > 1.0 || q > 1.0) throw std::invalid_argument("step exponents above 1 make the step sums finite");
  // sum alpha^2, sum gamma^2 < inf (this also bounds sum alpha^2 gamma^2)
  if (p <= 0.5 || q <= 0.5) throw std::invalid_argument("step exponents must exceed 1/2 for square summability");
  // sum gamma^2 / alpha < inf
  if (2.0 * q - p <= 1.0) throw std::invalid_argument("need 2 * gamma_exponent - alpha_exponent > 1");
  // sum min(alpha, gamma) = inf holds since max(p, q) <= 1
}

const char* to_string(TerminationReason reason) {
  return reason == TerminationReason::Converged ? "converged" : "max_iterations";
}

namespace {

std::vector<double> compute_link_scale(const Network& net) {
  std::vector<double> out(net.num_links(), 1.0);
  for (std::size_t l = 0; l < net.num_links(); ++l) {
    const auto& lk = net.link(static_cast<int>(l));
    double m = 0.0;
    for (int c : {lk.tail, lk.head}) {
      const double mc = net.cell(c).max_occupancy;
      if (std::isfinite(mc)) m = std::max(m, mc);
    }
    out[l] = m > 0.0 ? m : 1.0;
  }
  return out;
}

double local_objective(const SubProblem& sp, std::span<const double> values) {
  double s = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) s += sp.objective[j] * values[j];
  return s;
}

void update_one(const IterationState& state, const DistributedProblem& problem, const SolverConfig& config,
                IterationState& next, std::size_t s) {
  const auto& sp = problem.subproblem(static_cast<int>(s));
  const auto& cur = state.subs[s];
  auto& out = next.subs[s];
  const auto start = std::chrono::steady_clock::now();
  out.workspace = cur.workspace;
  out.workspace.tolerance = config.projection_tolerance;
  out.workspace.max_sweeps = config.max_sweeps;
  if (cur.frozen) {
    out.values = cur.values;
  } else {
    const auto aux = consensus_gradient_step(state, sp, problem.graph(), config.schedule);
    out.values = project(aux, sp.system, out.workspace);
  }
  out.frozen = cur.frozen;
  out.objective = local_objective(sp, out.values);
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

void check_state(const IterationState& state, const DistributedProblem& problem) {
  if (state.subs.size() != problem.num_subproblems()) throw std::invalid_argument("state does not match the problem");
  for (std::size_t s = 0; s < state.subs.size(); ++s) {
    if (state.subs[s].values.size() != problem.subproblem(static_cast<int>(s)).num_vars()) {
      throw std::invalid_argument("state dimension does not match sub-problem " + std::to_string(s));
    }
  }
}

IterationState make_state(const DistributedProblem& problem, const SolverConfig& config,
                          std::span<const double> global) {
  if (global.size() != problem.central().layout.size()) throw std::invalid_argument("warm start dimension mismatch");
  IterationState st;
  st.k = 0;
  st.subs.resize(problem.num_subproblems());
  for (std::size_t s = 0; s < st.subs.size(); ++s) {
    const auto& sp = problem.subproblem(static_cast<int>(s));
    auto& ss = st.subs[s];
    ss.values.resize(sp.num_vars());
    for (std::size_t j = 0; j < sp.num_vars(); ++j) ss.values[j] = global[sp.global[j]];
    ss.workspace.reset(sp.system);
    ss.workspace.tolerance = config.projection_tolerance;
    ss.workspace.max_sweeps = config.max_sweeps;
    ss.objective = local_objective(sp, ss.values);
  }
  for (std::size_t s = 0; s < st.subs.size(); ++s) {
    st.subs[s].disagreement =
        disagreement(st, problem.subproblem(static_cast<int>(s)), problem.central().layout, problem.link_scale());
  }
  return st;
}

}  // namespace

DistributedProblem::DistributedProblem(Network network, SignalSchedule signals, DemandProfile demand,
                                       const RegionAssignment& assignment, const WeightRule& weights)
    : network_(std::move(network)), signals_(std::move(signals)), demand_(std::move(demand)) {
  central_ = build_central_system(network_, signals_, demand_);
  subs_ = partition(network_, central_, assignment);
  graph_ = build_exchange_graph(subs_, weights);
  finish();
}

DistributedProblem::DistributedProblem(Network network, SignalSchedule signals, DemandProfile demand,
                                       CentralProblem central, std::vector<SubProblem> subproblems,
                                       ExchangeGraph graph)
    : network_(std::move(network)),
      signals_(std::move(signals)),
      demand_(std::move(demand)),
      central_(std::move(central)),
      subs_(std::move(subproblems)),
      graph_(std::move(graph)) {
  finish();
}

void DistributedProblem::finish() {
  shared_links_ = shared_link_set(subs_, central_.layout);
  link_scale_ = compute_link_scale(network_);
}

std::vector<double> gradient(const SubProblem& subproblem) { return subproblem.objective; }

std::vector<double> consensus_gradient_step(const IterationState& state, const SubProblem& subproblem,
                                            const ExchangeGraph& graph, const StepSchedule& schedule) {
  const auto s = static_cast<std::size_t>(subproblem.id);
  if (s >= state.subs.size()) throw std::invalid_argument("missing snapshot for sub-problem");
  const auto& own = state.subs[s].values;
  if (own.size() != subproblem.num_vars()) throw std::invalid_argument("snapshot dimension mismatch");
  const std::size_t k1 = state.k + 1;
  const double alpha = schedule.alpha(k1);
  const double gamma = schedule.gamma(k1);

  std::vector<double> aux(own.size());
  for (std::size_t j = 0; j < own.size(); ++j) aux[j] = own[j] - gamma * subproblem.objective[j];
  for (const auto& sv : subproblem.shared) {
    double self_weight = 0.0, sum = 0.0;
    for (const auto& co : sv.others) {
      const auto o = static_cast<std::size_t>(co.subproblem);
      if (o >= state.subs.size() || co.local >= state.subs[o].values.size()) {
        throw std::invalid_argument("missing neighbor snapshot for sub-problem " + std::to_string(o));
      }
      const double w = graph.weight(co.subproblem, subproblem.id);
      self_weight -= w;
      sum += w * state.subs[o].values[co.local];
    }
    const double x = own[sv.local];
    aux[sv.local] = x + alpha * (self_weight * x + sum) - gamma * subproblem.objective[sv.local];
  }
  return aux;
}

double disagreement(const IterationState& state, const SubProblem& subproblem, const VariableLayout& layout,
                    std::span<const double> link_scale) {
  const auto& own = state.subs[static_cast<std::size_t>(subproblem.id)].values;
  double total = 0.0;
  for (const auto& sv : subproblem.shared) {
    const auto g = subproblem.global[sv.local];
    if (!layout.is_flow(g)) continue;
    const double scale = link_scale[static_cast<std::size_t>(layout.decode(g).entity)];
    for (const auto& co : sv.others) {
      const double other = state.subs[static_cast<std::size_t>(co.subproblem)].values[co.local];
      total += std::abs(own[sv.local] / scale - other / scale);
    }
  }
  return total;
}

IterationState superstep_serial(const IterationState& state, const DistributedProblem& problem,
                                const SolverConfig& config) {
  check_state(state, problem);
  IterationState next;
  next.k = state.k + 1;
  next.subs.resize(state.subs.size());
  for (std::size_t s = 0; s < state.subs.size(); ++s) update_one(state, problem, config, next, s);
  return next;
}

IterationState superstep_parallel(const IterationState& state, const DistributedProblem& problem,
                                  const SolverConfig& config) {
  check_state(state, problem);
  IterationState next;
  next.k = state.k + 1;
  next.subs.resize(state.subs.size());
  const auto n = static_cast<long>(state.subs.size());
  std::vector<std::exception_ptr> errors(state.subs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long s = 0; s < n; ++s) {
    try {
      update_one(state, problem, config, next, static_cast<std::size_t>(s));
    } catch (...) {
      errors[static_cast<std::size_t>(s)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return next;
}

IterationState superstep(const IterationState& state, const DistributedProblem& problem,
                         const SolverConfig& config) {
  return config.parallel ? superstep_parallel(state, problem, config) : superstep_serial(state, problem, config);
}

IterationState initial_state(const DistributedProblem& problem, const SolverConfig& config) {
  const auto paths = shortest_paths(problem.network());
  const auto trace = simulate(problem.network(), problem.signals(), problem.demand(), paths);
  const auto values = trace.values();
  return make_state(problem, config, values);
}

IterationState initial_state(const DistributedProblem& problem, const SolverConfig& config,
                             std::span<const double> warm_start) {
  return make_state(problem, config, warm_start);
}

std::vector<double> assemble_solution(const DistributedProblem& problem, const IterationState& state) {
  const auto n = problem.central().layout.size();
  std::vector<double> sum(n, 0.0);
  std::vector<int> count(n, 0);
  for (std::size_t s = 0; s < state.subs.size(); ++s) {
    const auto& sp = problem.subproblem(static_cast<int>(s));
    for (std::size_t j = 0; j < sp.num_vars(); ++j) {
      sum[sp.global[j]] += state.subs[s].values[j];
      ++count[sp.global[j]];
    }
  }
  for (std::size_t g = 0; g < n; ++g) {
    if (count[g] > 0) sum[g] /= count[g];
  }
  return sum;
}

RunTrace run(const DistributedProblem& problem, const SolverConfig& config, IterationState state,
             const IterationObserver& observer) {
  check_state(state, problem);
  RunTrace trace;
  const auto& layout = problem.central().layout;
  while (state.k < config.max_iters) {
    state = superstep(state, problem, config);
    bool all_within = true;
    double total = 0.0;
    for (std::size_t s = 0; s < state.subs.size(); ++s) {
      auto& ss = state.subs[s];
      ss.disagreement = disagreement(state, problem.subproblem(static_cast<int>(s)), layout, problem.link_scale());
      ss.frozen = ss.disagreement <= config.epsilon;
      all_within = all_within && ss.frozen;
      total += ss.objective;
      trace.rows.push_back({state.k, static_cast<int>(s), ss.objective, ss.disagreement, ss.wall_ms});
    }
    trace.total_objective.push_back(total);
    if (observer) observer(state);
    if (all_within) {
      trace.reason = TerminationReason::Converged;
      break;
    }
  }
  trace.iterations = state.k;
  trace.solution = assemble_solution(problem, state);
  trace.final_state = std::move(state);
  return trace;
}

RunTrace run(const DistributedProblem& problem, const SolverConfig& config) {
  return run(problem, config, initial_state(problem, config));
}

SimTrace post_simulate(const DistributedProblem& problem, std::span<const double> solution) {
  return simulate(problem.network(), problem.signals(), problem.demand(),
                  Routing::from_flows(problem.network(), solution));
}

}  // namespace sodta
