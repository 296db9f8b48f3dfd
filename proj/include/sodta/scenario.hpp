#ifndef SODTA_SCENARIO_HPP_
#define SODTA_SCENARIO_HPP_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sodta/dga.hpp"
#include "sodta/network.hpp"
#include "sodta/partition.hpp"

namespace sodta {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed scenario file; ids are the external ids written in the file.
struct Scenario {
  struct CellEntry {
    int id = 0;
    CellKind kind = CellKind::Ordinary;
    std::optional<double> max_occupancy;  // null = unbounded (sources, sinks)
    double sat_flow = 0.0;
  };
  struct DemandTriplet {
    int cell = 0;
    int t = 0;
    int od = 0;  // index into od_pairs
    double vehicles = 0.0;
  };

  std::string name;
  std::vector<CellEntry> cells;
  std::vector<std::pair<int, int>> links;
  double delta = 1.0;
  double tau = 1.0;
  int horizon = 1;
  std::vector<std::pair<int, int>> od_pairs;
  std::vector<DemandTriplet> demand;
  std::optional<std::vector<std::pair<int, int>>> signals;  // green (cell, t); absent = always green
  std::vector<std::pair<int, int>> partition;               // (cell, region)
  SolverConfig solver;
};

/// Schema-checked parse; unknown keys and wrong types are rejected.
Scenario parse_scenario(const nlohmann::json& doc);
nlohmann::json to_json(const Scenario& scenario);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// Validated model objects built from a scenario.
struct Instance {
  Network network;
  SignalSchedule signals;
  DemandProfile demand;
  RegionAssignment assignment;
  SolverConfig config;
};

/// Throws ScenarioError for anything that fails network, demand or
/// partition validation.
Instance build_instance(const Scenario& scenario);

}  // namespace sodta

#endif  // SODTA_SCENARIO_HPP_
