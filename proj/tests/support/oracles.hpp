#ifndef SODTA_TESTS_ORACLES_HPP_
#define SODTA_TESTS_ORACLES_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sodta/formulation.hpp"
#include "sodta/network.hpp"
#include "sodta/scenario.hpp"

namespace sodta::oracles {

std::string scenario_path(const std::string& name);
Instance load_instance(const std::string& name);
std::vector<std::string> bundled_scenarios();

struct VertexOptimum {
  double objective = 0.0;
  std::vector<double> x;
  std::size_t vertices_checked = 0;
};

/// min cost.x over {x >= 0, rows} by enumerating every basic solution
/// (n linearly independent active constraints). nullopt if no feasible
/// vertex exists. Only sensible for a dozen or so variables.
std::optional<VertexOptimum> enumerate_vertices(const ConstraintSystem& system, std::span<const double> cost);

struct ActiveSetProjection {
  std::vector<double> x;
  std::size_t active_size = 0;
};

/// Euclidean projection by trying active sets (inequality rows and bounds)
/// in order of increasing size; the first set satisfying the KKT conditions
/// gives the answer. nullopt if none up to max_active works.
std::optional<ActiveSetProjection> project_by_active_sets(std::span<const double> target,
                                                          const ConstraintSystem& system,
                                                          std::size_t max_active);

/// Every simple origin-destination cell path, by depth-first search.
std::vector<std::vector<int>> all_simple_paths(const Network& network, int origin, int destination);

/// Random LP with a known feasible point and a bounding row sum(x) <= B.
struct RandomLp {
  ConstraintSystem system;
  std::vector<double> cost;
};
RandomLp random_feasible_lp(std::mt19937_64& rng, std::size_t max_vars);

/// Random polyhedron {x >= 0, rows} containing a known point, plus a target.
struct RandomProjection {
  ConstraintSystem system;
  std::vector<double> target;
};
RandomProjection random_projection_case(std::mt19937_64& rng, std::size_t max_vars);

}  // namespace sodta::oracles

#endif  // SODTA_TESTS_ORACLES_HPP_
