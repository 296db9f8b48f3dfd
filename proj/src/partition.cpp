#include "sodta/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>

namespace sodta {

std::vector<SubProblem> partition_by_owner(const CentralProblem& central, std::span<const int> row_owner,
                                           std::span<const int> objective_owner, int num_subproblems) {
  const auto& sys = central.system;
  const std::size_t nvars = sys.num_vars();
  if (num_subproblems < 1) throw PartitionError("need at least one sub-problem");
  if (row_owner.size() != sys.num_rows()) throw PartitionError("row owner list does not cover every row");
  if (objective_owner.size() != nvars) throw PartitionError("objective owner list does not cover every variable");
  const auto S = static_cast<std::size_t>(num_subproblems);

  // Which sub-problems carry each central variable.
  std::vector<std::vector<int>> carriers(nvars);
  auto mark = [&](std::size_t g, int s) {
    auto& c = carriers[g];
    if (c.empty() || c.back() != s) {
      if (std::find(c.begin(), c.end(), s) == c.end()) c.push_back(s);
    }
  };
  std::vector<std::vector<std::size_t>> rows_of(S);
  for (std::size_t r = 0; r < sys.num_rows(); ++r) {
    const int s = row_owner[r];
    if (s < 0 || s >= num_subproblems) throw PartitionError("row assigned to an unknown sub-problem");
    rows_of[static_cast<std::size_t>(s)].push_back(r);
    for (auto g : sys.row_indices(r)) mark(g, s);
  }
  for (std::size_t g = 0; g < nvars; ++g) {
    const int s = objective_owner[g];
    if (s < 0) {
      if (central.objective.coefficients[g] != 0.0) throw PartitionError("objective term without an owner");
      continue;
    }
    if (s >= num_subproblems) throw PartitionError("objective term assigned to an unknown sub-problem");
    mark(g, s);
  }

  std::vector<SubProblem> subs(S);
  for (std::size_t g = 0; g < nvars; ++g) {
    std::sort(carriers[g].begin(), carriers[g].end());
    for (int s : carriers[g]) subs[static_cast<std::size_t>(s)].global.push_back(g);
  }
  // local index lookup: position of g in the (ascending) global list
  auto local_of = [&](int s, std::size_t g) {
    const auto& gl = subs[static_cast<std::size_t>(s)].global;
    return static_cast<std::size_t>(std::lower_bound(gl.begin(), gl.end(), g) - gl.begin());
  };

  std::vector<std::size_t> idx;
  for (std::size_t si = 0; si < S; ++si) {
    auto& sp = subs[si];
    sp.id = static_cast<int>(si);
    sp.region = static_cast<int>(si);
    if (sp.global.empty()) throw PartitionError("sub-problem " + std::to_string(si) + " is empty");
    sp.system = ConstraintSystem(sp.global.size());
    for (auto r : rows_of[si]) {
      idx.clear();
      for (auto g : sys.row_indices(r)) idx.push_back(local_of(static_cast<int>(si), g));
      sp.system.add_row(idx, sys.row_values(r), sys.relation(r), sys.rhs(r), sys.tag(r));
      sp.row_origin.push_back(r);
    }
    sp.objective.assign(sp.global.size(), 0.0);
    sp.is_shared.assign(sp.global.size(), 0);
    for (std::size_t j = 0; j < sp.global.size(); ++j) {
      const auto g = sp.global[j];
      if (objective_owner[g] == static_cast<int>(si)) sp.objective[j] = central.objective.coefficients[g];
      if (carriers[g].size() > 1) {
        SharedVariable sv;
        sv.local = j;
        for (int o : carriers[g]) {
          if (o != static_cast<int>(si)) sv.others.push_back({o, local_of(o, g)});
        }
        sp.shared.push_back(std::move(sv));
        sp.is_shared[j] = 1;
      }
    }
  }
  return subs;
}

std::vector<SubProblem> partition(const Network& network, const CentralProblem& central,
                                  const RegionAssignment& assignment) {
  if (assignment.region_of_cell.size() != network.num_cells()) {
    throw PartitionError("region assignment does not cover every cell");
  }
  std::vector<int> labels;
  for (std::size_t i = 0; i < network.num_cells(); ++i) {
    const int r = assignment.region_of_cell[i];
    if (r == std::numeric_limits<int>::min()) {
      throw PartitionError("cell " + std::to_string(network.external_id(static_cast<int>(i))) + " is unassigned");
    }
    labels.push_back(r);
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  auto rank = [&](int label) {
    return static_cast<int>(std::lower_bound(labels.begin(), labels.end(), label) - labels.begin());
  };
  std::vector<int> owner_of_cell(network.num_cells());
  for (std::size_t i = 0; i < network.num_cells(); ++i) owner_of_cell[i] = rank(assignment.region_of_cell[i]);

  const auto& sys = central.system;
  std::vector<int> row_owner(sys.num_rows());
  for (std::size_t r = 0; r < sys.num_rows(); ++r) {
    row_owner[r] = owner_of_cell[static_cast<std::size_t>(sys.tag(r).cell)];
  }
  std::vector<int> objective_owner(sys.num_vars(), -1);
  for (std::size_t g = 0; g < central.layout.num_occupancy(); ++g) {
    objective_owner[g] = owner_of_cell[static_cast<std::size_t>(central.layout.decode(g).entity)];
  }

  auto subs = partition_by_owner(central, row_owner, objective_owner, static_cast<int>(labels.size()));
  for (auto& sp : subs) sp.region = labels[static_cast<std::size_t>(sp.id)];
  for (std::size_t i = 0; i < network.num_cells(); ++i) {
    subs[static_cast<std::size_t>(owner_of_cell[i])].cells.push_back(static_cast<int>(i));
  }
  return subs;
}

std::vector<int> ExchangeGraph::neighbors(int s) const {
  std::vector<int> out;
  for (int o = 0; o < n_; ++o) {
    if (o == s || weight(o, s) != 0.0) out.push_back(o);
  }
  return out;
}

std::vector<std::pair<int, int>> ExchangeGraph::arcs() const {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < n_; ++a) {
    for (int b = 0; b < n_; ++b) {
      if (has_arc(a, b)) out.emplace_back(a, b);
    }
  }
  return out;
}

ExchangeGraph build_exchange_graph(const std::vector<SubProblem>& subproblems, const WeightRule& rule) {
  const int n = static_cast<int>(subproblems.size());
  ExchangeGraph g(n);
  std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
  for (const auto& sp : subproblems) {
    for (const auto& sv : sp.shared) {
      for (const auto& co : sv.others) adj[static_cast<std::size_t>(sp.id)].insert(co.subproblem);
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int b : adj[static_cast<std::size_t>(a)]) {
      const double w = rule.weight ? rule.weight(a, b) : 1.0;
      if (!(w > 0.0)) {
        throw PartitionError("off-diagonal weight on arc (" + std::to_string(a) + ", " + std::to_string(b) +
                             ") must be positive");
      }
      g.set_weight(a, b, w);
    }
  }
  for (int a = 0; a < n; ++a) {
    double sum = 0.0;
    for (int b = 0; b < n; ++b) {
      if (b != a) sum += g.weight(a, b);
    }
    g.set_weight(a, a, -sum);
  }
  validate_exchange_graph(g, rule.theta, rule.theta_prime);
  return g;
}

void validate_exchange_graph(const ExchangeGraph& graph, double theta, double theta_prime) {
  const int n = graph.size();
  if (n == 0) throw PartitionError("exchange graph has no nodes");
  if (!(theta > 0.0) || !(theta_prime >= theta)) throw PartitionError("weight bounds need 0 < theta <= theta'");

  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int a = q.front();
    q.pop();
    for (int b = 0; b < n; ++b) {
      if (b != a && graph.weight(a, b) != 0.0 && !seen[static_cast<std::size_t>(b)]) {
        seen[static_cast<std::size_t>(b)] = 1;
        ++count;
        q.push(b);
      }
    }
  }
  if (count != n) throw PartitionError("information exchange graph is disconnected");

  for (int a = 0; a < n; ++a) {
    double sum = 0.0;
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      const double w = graph.weight(a, b);
      if (w != graph.weight(b, a)) {
        throw PartitionError("asymmetric weights on (" + std::to_string(a) + ", " + std::to_string(b) + ")");
      }
      if (w != 0.0 && (w < theta || w > theta_prime)) {
        throw PartitionError("weight on (" + std::to_string(a) + ", " + std::to_string(b) +
                             ") outside [theta, theta']");
      }
      sum += w;
    }
    if (std::abs(graph.weight(a, a) + sum) > 1e-12 * std::max(1.0, sum)) {
      throw PartitionError("self-arc weight of " + std::to_string(a) + " is not minus the sum of its arcs");
    }
  }
}

std::vector<SharedLink> shared_link_set(const std::vector<SubProblem>& subproblems, const VariableLayout& layout) {
  std::map<int, std::set<int>> owners;
  for (const auto& sp : subproblems) {
    for (const auto& sv : sp.shared) {
      const auto g = sp.global[sv.local];
      if (!layout.is_flow(g)) continue;
      auto& set = owners[layout.decode(g).entity];
      set.insert(sp.id);
      for (const auto& co : sv.others) set.insert(co.subproblem);
    }
  }
  std::vector<SharedLink> out;
  for (auto& [link, set] : owners) out.push_back({link, std::vector<int>(set.begin(), set.end())});
  return out;
}

}  // namespace sodta
