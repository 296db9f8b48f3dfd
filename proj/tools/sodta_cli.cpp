#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "sodta/checkpoint.hpp"
#include "sodta/dga.hpp"
#include "sodta/report.hpp"
#include "sodta/scenario.hpp"
#include "sodta/simplex.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kMalformed = 2, kNotConverged = 3, kOracleFailed = 4 };

struct Overrides {
  double demand_scale = 1.0;
  std::optional<double> epsilon;
  std::optional<std::size_t> max_iters;
};

sodta::Instance load(const std::string& path, const Overrides& ov) {
  auto inst = sodta::build_instance(sodta::load_scenario(path));
  if (ov.demand_scale != 1.0) {
    if (!(ov.demand_scale >= 0.0)) throw sodta::ScenarioError("demand scale must be nonnegative");
    inst.demand = inst.demand.scaled(ov.demand_scale);
  }
  if (ov.epsilon) inst.config.epsilon = *ov.epsilon;
  if (ov.max_iters) inst.config.max_iters = *ov.max_iters;
  return inst;
}

fs::path prepare_out(const std::string& dir) {
  fs::path out = dir.empty() ? fs::path(".") : fs::path(dir);
  fs::create_directories(out);
  return out;
}

int cmd_validate(const std::string& path, const Overrides& ov) {
  auto inst = load(path, ov);
  sodta::DistributedProblem problem(inst.network, inst.signals, inst.demand, inst.assignment, inst.config.weights);
  std::cout << "ok: " << inst.network.num_cells() << " cells, " << inst.network.num_links() << " links, "
            << inst.network.num_ods() << " ODs, " << problem.central().layout.size() << " variables, "
            << problem.central().system.num_rows() << " rows, " << problem.num_subproblems() << " sub-problems\n";
  return kOk;
}

int cmd_simulate(const std::string& path, const Overrides& ov, const std::string& out_dir) {
  auto inst = load(path, ov);
  const auto trace = sodta::simulate(inst.network, inst.signals, inst.demand, sodta::shortest_paths(inst.network));
  const auto central = sodta::build_central_system(inst.network, inst.signals, inst.demand);
  const auto values = trace.values();
  const auto report = sodta::check_feasibility(central.system, values, 1e-9);
  std::cout << "objective_hr " << sodta::format_double(sodta::total_travel_time(trace, inst.network)) << '\n'
            << "max_violation " << sodta::format_double(report.max_violation) << '\n';
  if (!out_dir.empty()) {
    const auto out = prepare_out(out_dir);
    sodta::write_solution_csv(out / "simulation.csv", inst.network, central.layout, values);
  }
  return kOk;
}

int report_lp_failure(const sodta::LpResult& lp) {
  std::cerr << "oracle: LP is " << (lp.status == sodta::LpStatus::Infeasible ? "infeasible" : "unbounded") << '\n';
  return kOracleFailed;
}

int cmd_oracle(const std::string& path, const Overrides& ov, const std::string& out_dir) {
  auto inst = load(path, ov);
  const auto central = sodta::build_central_system(inst.network, inst.signals, inst.demand);
  const auto lp = sodta::solve_central(central.system, central.objective);
  if (lp.status != sodta::LpStatus::Optimal) return report_lp_failure(lp);
  std::cout << "objective " << sodta::format_double(lp.objective) << '\n'
            << "objective_hr " << sodta::format_double(lp.objective / 3600.0) << '\n'
            << "pivots " << lp.iterations << '\n';
  const auto resim = sodta::simulate(inst.network, inst.signals, inst.demand,
                                     sodta::Routing::from_flows(inst.network, lp.x));
  std::cout << "resimulated_hr " << sodta::format_double(sodta::total_travel_time(resim, inst.network)) << '\n';
  if (!out_dir.empty()) {
    const auto out = prepare_out(out_dir);
    sodta::write_solution_csv(out / "oracle_solution.csv", inst.network, central.layout, lp.x);
  }
  return kOk;
}

struct SolveFlags {
  bool oracle = false;
  bool post_simulate = false;
  bool plot = false;
  bool no_timing = false;
  std::string out_dir;
  std::optional<std::size_t> checkpoint_every;
  std::string resume;
};

int cmd_solve(const std::string& path, const Overrides& ov, const SolveFlags& flags) {
  auto inst = load(path, ov);
  auto& config = inst.config;
  if (flags.checkpoint_every) config.checkpoint_interval = *flags.checkpoint_every;
  const auto out = prepare_out(flags.out_dir);

  sodta::DistributedProblem problem(inst.network, inst.signals, inst.demand, inst.assignment, config.weights);

  const auto t0 = std::chrono::steady_clock::now();
  sodta::IterationState start;
  if (flags.resume.empty()) {
    start = sodta::initial_state(problem, config);
  } else {
    start = sodta::load_checkpoint(flags.resume);
  }

  auto observer = [&](const sodta::IterationState& st) {
    if (config.checkpoint_interval > 0 && st.k % config.checkpoint_interval == 0) {
      sodta::save_checkpoint(out / ("checkpoint_" + std::to_string(st.k) + ".sdga"), st);
    }
  };
  auto trace = sodta::run(problem, config, std::move(start), observer);
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (flags.no_timing) {
    for (auto& r : trace.rows) r.wall_ms = 0.0;
  }

  sodta::write_trace_csv(out / "trace.csv", trace.rows);
  const auto& layout = problem.central().layout;
  sodta::write_solution_csv(out / "solution.csv", inst.network, layout, trace.solution);

  const std::string demand_label = sodta::format_double(inst.demand.total());
  std::vector<sodta::SummaryRow> summary;
  const double dga_obj = sodta::evaluate_objective(problem.central().objective, trace.solution);
  summary.push_back({demand_label, "DGA", dga_obj / 3600.0, std::nullopt, flags.no_timing ? 0.0 : runtime,
                     trace.iterations});

  std::optional<double> sim_obj;
  if (flags.post_simulate || flags.oracle) {
    const auto sim = sodta::post_simulate(problem, trace.solution);
    const auto values = sim.values();
    sim_obj = sodta::evaluate_objective(problem.central().objective, values);
    sodta::write_solution_csv(out / "post_simulated.csv", inst.network, layout, values);
    summary.push_back({demand_label, "DGA+CTM", *sim_obj / 3600.0, std::nullopt, flags.no_timing ? 0.0 : runtime,
                       trace.iterations});
  }

  std::optional<double> oracle_obj;
  int code = kOk;
  if (flags.oracle) {
    const auto lt0 = std::chrono::steady_clock::now();
    const auto lp = sodta::solve_central(problem.central().system, problem.central().objective);
    const double lp_runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - lt0).count();
    if (lp.status != sodta::LpStatus::Optimal) {
      code = report_lp_failure(lp);
    } else {
      oracle_obj = lp.objective;
      if (lp.objective > 0.0) summary.back().gap_pct = sodta::optimality_gap(*sim_obj, lp.objective);
      summary.push_back({demand_label, "LP", lp.objective / 3600.0, std::nullopt,
                         flags.no_timing ? 0.0 : lp_runtime, lp.iterations});
      sodta::write_solution_csv(out / "oracle_solution.csv", inst.network, layout, lp.x);
    }
  }
  sodta::write_summary_csv(out / "summary.csv", summary);
  sodta::write_summary_csv(std::cout, summary);

  if (flags.plot) {
    sodta::write_svg(out / "objective.svg", sodta::objective_plot(trace, oracle_obj));
    sodta::write_svg(out / "disagreement.svg", sodta::disagreement_plot(trace, config.epsilon));
  }

  if (code != kOk) return code;
  if (trace.reason != sodta::TerminationReason::Converged) {
    std::cerr << "not converged after " << trace.iterations << " iterations; best-so-far written to " << out.string()
              << '\n';
    return kNotConverged;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed CTM system-optimal dynamic traffic assignment"};
  app.require_subcommand(1);

  Overrides ov;
  int threads = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--demand-scale", ov.demand_scale, "Multiply every demand entry");
    sub->add_option("--threads", threads, "OpenMP thread count (0 keeps the default)");
  };

  std::string scenario;
  std::string out_dir;
  SolveFlags flags;

  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("scenario", scenario)->required();
  add_common(validate);

  auto* simulate = app.add_subcommand("simulate", "Shortest-path CTM run used for initialisation");
  simulate->add_option("scenario", scenario)->required();
  simulate->add_option("--out", out_dir, "Output directory");
  add_common(simulate);

  auto* oracle = app.add_subcommand("oracle", "Solve the central LP");
  oracle->add_option("scenario", scenario)->required();
  oracle->add_option("--out", out_dir, "Output directory");
  add_common(oracle);

  auto* solve = app.add_subcommand("solve", "Run the distributed solver");
  solve->add_option("scenario", scenario)->required();
  solve->add_flag("--oracle", flags.oracle, "Also solve the central LP and report the gap");
  solve->add_flag("--post-simulate", flags.post_simulate, "Re-simulate the solution with the CTM");
  solve->add_option("--out", flags.out_dir, "Output directory");
  solve->add_flag("--plot", flags.plot, "Write SVG plots");
  solve->add_option("--checkpoint-every", flags.checkpoint_every, "Checkpoint interval in iterations");
  solve->add_option("--resume", flags.resume, "Resume from a checkpoint file")->check(CLI::ExistingFile);
  solve->add_flag("--no-timing", flags.no_timing, "Write zero timings for reproducible outputs");
  std::optional<double> epsilon;
  std::optional<std::size_t> max_iters;
  solve->add_option("--epsilon", epsilon, "Override the disagreement threshold");
  solve->add_option("--max-iters", max_iters, "Override the iteration limit");
  add_common(solve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kMalformed;
  }
  ov.epsilon = epsilon;
  ov.max_iters = max_iters;
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*validate) return cmd_validate(scenario, ov);
    if (*simulate) return cmd_simulate(scenario, ov, out_dir);
    if (*oracle) return cmd_oracle(scenario, ov, out_dir);
    return cmd_solve(scenario, ov, flags);
  } catch (const sodta::ScenarioError& e) {
    std::cerr << "malformed scenario: " << e.what() << '\n';
    return kMalformed;
  } catch (const sodta::NetworkError& e) {
    std::cerr << "malformed scenario: " << e.what() << '\n';
    return kMalformed;
  } catch (const sodta::PartitionError& e) {
    std::cerr << "malformed scenario: " << e.what() << '\n';
    return kMalformed;
  } catch (const sodta::FormulationError& e) {
    std::cerr << "malformed scenario: " << e.what() << '\n';
    return kMalformed;
  } catch (const sodta::CheckpointError& e) {
    std::cerr << "checkpoint: " << e.what() << '\n';
    return kMalformed;
  } catch (const sodta::ProjectionError& e) {
    std::cerr << "projection failed: " << e.what() << '\n';
    return kNotConverged;
  } catch (const sodta::OracleError& e) {
    std::cerr << "oracle: " << e.what() << '\n';
    return kOracleFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
