#include "sodta/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>

namespace sodta {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioError(where + ": " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional) {
  if (!obj.is_object()) fail(where, "expected an object");
  std::set<std::string> allowed;
  for (const char* k : required) {
    allowed.insert(k);
    if (!obj.contains(k)) fail(where, std::string("missing key '") + k + "'");
  }
  for (const char* k : optional) allowed.insert(k);
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail(where, "unknown key '" + key + "'");
  }
}

int get_int(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) fail(where, std::string("'") + key + "' must be an integer");
  return v.get<int>();
}

double get_number(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(where, std::string("'") + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(where, std::string("'") + key + "' must be finite");
  return d;
}

std::size_t get_count(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    fail(where, std::string("'") + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

const json& get_array(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_array()) fail(where, std::string("'") + key + "' must be an array");
  return v;
}

SolverConfig parse_solver(const json& s) {
  const std::string where = "solver";
  check_keys(s, where, {},
             {"epsilon", "max_iters", "schedule", "weights", "projection_tolerance", "max_sweeps",
              "checkpoint_interval", "seed"});
  SolverConfig c;
  if (s.contains("epsilon")) c.epsilon = get_number(s, "epsilon", where);
  if (s.contains("max_iters")) c.max_iters = get_count(s, "max_iters", where);
  if (s.contains("projection_tolerance")) c.projection_tolerance = get_number(s, "projection_tolerance", where);
  if (s.contains("max_sweeps")) c.max_sweeps = get_count(s, "max_sweeps", where);
  if (s.contains("checkpoint_interval")) c.checkpoint_interval = get_count(s, "checkpoint_interval", where);
  if (s.contains("seed")) c.seed = get_count(s, "seed", where);
  if (s.contains("schedule")) {
    const auto& sc = s.at("schedule");
    const std::string w = "solver.schedule";
    check_keys(sc, w, {}, {"name", "alpha_scale", "alpha_exponent", "gamma_scale", "gamma_exponent"});
    if (sc.contains("name")) {
      if (!sc.at("name").is_string()) fail(w, "'name' must be a string");
      c.schedule.name = sc.at("name").get<std::string>();
      if (c.schedule.name != "power") fail(w, "unknown schedule '" + c.schedule.name + "'");
    }
    if (sc.contains("alpha_scale")) c.schedule.alpha_scale = get_number(sc, "alpha_scale", w);
    if (sc.contains("alpha_exponent")) c.schedule.alpha_exponent = get_number(sc, "alpha_exponent", w);
    if (sc.contains("gamma_scale")) c.schedule.gamma_scale = get_number(sc, "gamma_scale", w);
    if (sc.contains("gamma_exponent")) c.schedule.gamma_exponent = get_number(sc, "gamma_exponent", w);
  }
  if (s.contains("weights")) {
    const auto& wr = s.at("weights");
    const std::string w = "solver.weights";
    check_keys(wr, w, {}, {"rule", "value", "theta", "theta_prime"});
    if (wr.contains("rule")) {
      if (!wr.at("rule").is_string()) fail(w, "'rule' must be a string");
      c.weights.name = wr.at("rule").get<std::string>();
    }
    if (wr.contains("theta")) c.weights.theta = get_number(wr, "theta", w);
    if (wr.contains("theta_prime")) c.weights.theta_prime = get_number(wr, "theta_prime", w);
    if (c.weights.name == "constant") {
      if (!wr.contains("value")) fail(w, "constant rule needs 'value'");
      const double v = get_number(wr, "value", w);
      c.weights.weight = [v](int, int) { return v; };
      // keep the value for serialisation
      c.weights.name = "constant:" + wr.at("value").dump();
    } else if (c.weights.name != "unit") {
      fail(w, "unknown weight rule '" + c.weights.name + "'");
    } else if (wr.contains("value")) {
      fail(w, "'value' only applies to the constant rule");
    }
  }
  if (!(c.epsilon >= 0.0)) fail(where, "epsilon must be >= 0");
  if (!(c.projection_tolerance > 0.0)) fail(where, "projection_tolerance must be > 0");
  try {
    c.schedule.validate();
  } catch (const std::invalid_argument& e) {
    fail("solver.schedule", e.what());
  }
  return c;
}

json solver_to_json(const SolverConfig& c) {
  json weights = {{"theta", c.weights.theta}, {"theta_prime", c.weights.theta_prime}};
  if (c.weights.name.rfind("constant:", 0) == 0) {
    weights["rule"] = "constant";
    weights["value"] = json::parse(c.weights.name.substr(9));
  } else {
    weights["rule"] = c.weights.name;
  }
  return {
      {"epsilon", c.epsilon},
      {"max_iters", c.max_iters},
      {"schedule",
       {{"name", c.schedule.name},
        {"alpha_scale", c.schedule.alpha_scale},
        {"alpha_exponent", c.schedule.alpha_exponent},
        {"gamma_scale", c.schedule.gamma_scale},
        {"gamma_exponent", c.schedule.gamma_exponent}}},
      {"weights", weights},
      {"projection_tolerance", c.projection_tolerance},
      {"max_sweeps", c.max_sweeps},
      {"checkpoint_interval", c.checkpoint_interval},
      {"seed", c.seed},
  };
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  check_keys(doc, "scenario", {"cells", "links", "delta", "tau", "horizon", "od_pairs", "demand"},
             {"name", "signals", "partition", "solver"});
  Scenario sc;
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) fail("scenario", "'name' must be a string");
    sc.name = doc.at("name").get<std::string>();
  }
  sc.delta = get_number(doc, "delta", "scenario");
  sc.tau = get_number(doc, "tau", "scenario");
  sc.horizon = get_int(doc, "horizon", "scenario");

  for (const auto& c : get_array(doc, "cells", "scenario")) {
    const std::string w = "cells[]";
    check_keys(c, w, {"id", "kind", "M", "F"}, {});
    Scenario::CellEntry e;
    e.id = get_int(c, "id", w);
    if (!c.at("kind").is_string()) fail(w, "'kind' must be a string");
    try {
      e.kind = cell_kind_from_string(c.at("kind").get<std::string>());
    } catch (const NetworkError& err) {
      fail(w, err.what());
    }
    if (!c.at("M").is_null()) e.max_occupancy = get_number(c, "M", w);
    e.sat_flow = get_number(c, "F", w);
    sc.cells.push_back(e);
  }
  for (const auto& l : get_array(doc, "links", "scenario")) {
    check_keys(l, "links[]", {"tail", "head"}, {});
    sc.links.emplace_back(get_int(l, "tail", "links[]"), get_int(l, "head", "links[]"));
  }
  for (const auto& od : get_array(doc, "od_pairs", "scenario")) {
    check_keys(od, "od_pairs[]", {"origin", "destination"}, {});
    sc.od_pairs.emplace_back(get_int(od, "origin", "od_pairs[]"), get_int(od, "destination", "od_pairs[]"));
  }
  for (const auto& d : get_array(doc, "demand", "scenario")) {
    const std::string w = "demand[]";
    check_keys(d, w, {"cell", "t", "od", "vehicles"}, {});
    sc.demand.push_back({get_int(d, "cell", w), get_int(d, "t", w), get_int(d, "od", w), get_number(d, "vehicles", w)});
  }
  if (doc.contains("signals")) {
    std::vector<std::pair<int, int>> green;
    for (const auto& g : get_array(doc, "signals", "scenario")) {
      check_keys(g, "signals[]", {"cell", "t"}, {});
      green.emplace_back(get_int(g, "cell", "signals[]"), get_int(g, "t", "signals[]"));
    }
    sc.signals = std::move(green);
  }
  if (doc.contains("partition")) {
    for (const auto& p : get_array(doc, "partition", "scenario")) {
      check_keys(p, "partition[]", {"cell", "region"}, {});
      sc.partition.emplace_back(get_int(p, "cell", "partition[]"), get_int(p, "region", "partition[]"));
    }
  }
  if (doc.contains("solver")) sc.solver = parse_solver(doc.at("solver"));
  return sc;
}

json to_json(const Scenario& sc) {
  json doc;
  if (!sc.name.empty()) doc["name"] = sc.name;
  doc["delta"] = sc.delta;
  doc["tau"] = sc.tau;
  doc["horizon"] = sc.horizon;
  doc["cells"] = json::array();
  for (const auto& c : sc.cells) {
    json e = {{"id", c.id}, {"kind", to_string(c.kind)}, {"F", c.sat_flow}};
    e["M"] = c.max_occupancy ? json(*c.max_occupancy) : json(nullptr);
    doc["cells"].push_back(e);
  }
  doc["links"] = json::array();
  for (const auto& [t, h] : sc.links) doc["links"].push_back({{"tail", t}, {"head", h}});
  doc["od_pairs"] = json::array();
  for (const auto& [o, d] : sc.od_pairs) doc["od_pairs"].push_back({{"origin", o}, {"destination", d}});
  doc["demand"] = json::array();
  for (const auto& d : sc.demand) {
    doc["demand"].push_back({{"cell", d.cell}, {"t", d.t}, {"od", d.od}, {"vehicles", d.vehicles}});
  }
  if (sc.signals) {
    doc["signals"] = json::array();
    for (const auto& [c, t] : *sc.signals) doc["signals"].push_back({{"cell", c}, {"t", t}});
  }
  if (!sc.partition.empty()) {
    doc["partition"] = json::array();
    for (const auto& [c, r] : sc.partition) doc["partition"].push_back({{"cell", c}, {"region", r}});
  }
  doc["solver"] = solver_to_json(sc.solver);
  return doc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
  auto sc = parse_scenario(doc);
  if (sc.name.empty()) sc.name = path.stem().string();
  return sc;
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write scenario file " + path.string());
  out << to_json(scenario).dump(2) << '\n';
}

Instance build_instance(const Scenario& sc) {
  std::vector<Cell> cells;
  for (const auto& c : sc.cells) {
    cells.push_back({c.id, c.kind, c.max_occupancy.value_or(kUnbounded), c.sat_flow});
  }
  try {
    Network net = build_network(std::move(cells), sc.links, sc.delta, sc.tau, sc.horizon, sc.od_pairs);

    SignalSchedule signals = SignalSchedule::always_green(net);
    if (sc.signals) {
      std::vector<std::pair<int, int>> green;
      for (const auto& [id, t] : *sc.signals) {
        const int i = net.index_of(id);
        if (i < 0) throw ScenarioError("signals: unknown cell " + std::to_string(id));
        green.emplace_back(i, t);
      }
      signals = SignalSchedule::from_green_list(net, green);
    }

    DemandProfile demand;
    for (const auto& d : sc.demand) {
      const int i = net.index_of(d.cell);
      if (i < 0) throw ScenarioError("demand: unknown cell " + std::to_string(d.cell));
      demand.entries.push_back({i, d.t, d.od, d.vehicles});
    }
    const auto problems = validate_demand(net, demand);
    if (!problems.empty()) throw ScenarioError("demand: " + problems.front());

    RegionAssignment assignment;
    assignment.region_of_cell.assign(net.num_cells(), std::numeric_limits<int>::min());
    if (sc.partition.empty()) {
      std::fill(assignment.region_of_cell.begin(), assignment.region_of_cell.end(), 0);
    } else {
      for (const auto& [id, region] : sc.partition) {
        const int i = net.index_of(id);
        if (i < 0) throw ScenarioError("partition: unknown cell " + std::to_string(id));
        if (assignment.region_of_cell[static_cast<std::size_t>(i)] != std::numeric_limits<int>::min()) {
          throw ScenarioError("partition: cell " + std::to_string(id) + " assigned twice");
        }
        assignment.region_of_cell[static_cast<std::size_t>(i)] = region;
      }
      for (std::size_t i = 0; i < net.num_cells(); ++i) {
        if (assignment.region_of_cell[i] == std::numeric_limits<int>::min()) {
          throw ScenarioError("partition: cell " + std::to_string(net.external_id(static_cast<int>(i))) +
                              " is unassigned");
        }
      }
    }
    return Instance{std::move(net), std::move(signals), std::move(demand), std::move(assignment), sc.solver};
  } catch (const NetworkError& e) {
    throw ScenarioError(e.what());
  }
}

}  // namespace sodta
