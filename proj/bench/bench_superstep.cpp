#include <benchmark/benchmark.h>

#include <omp.h>

#include "sodta/dga.hpp"
#include "sodta/scenario.hpp"

namespace {

struct Fixture {
  sodta::Instance inst;
  sodta::DistributedProblem problem;
  sodta::IterationState state;

  explicit Fixture(const std::string& name)
      : inst(sodta::build_instance(sodta::load_scenario(std::string(SODTA_SCENARIO_DIR) + "/" + name + ".json"))),
        problem(inst.network, inst.signals, inst.demand, inst.assignment, inst.config.weights) {
    // start from a mid-run state so the projections are warm, as in a long solve
    auto cfg = inst.config;
    cfg.max_iters = 200;
    state = sodta::run(problem, cfg).final_state;
    for (auto& ss : state.subs) ss.frozen = false;
  }
};

Fixture& grid() {
  static Fixture f("grid2x2");
  return f;
}

void BM_SuperstepSerial(benchmark::State& st) {
  auto& f = grid();
  for (auto _ : st) benchmark::DoNotOptimize(sodta::superstep_serial(f.state, f.problem, f.inst.config));
}

void BM_SuperstepParallel(benchmark::State& st) {
  auto& f = grid();
  omp_set_num_threads(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(sodta::superstep_parallel(f.state, f.problem, f.inst.config));
  st.counters["threads"] = static_cast<double>(st.range(0));
}

void BM_FullSolve(benchmark::State& st) {
  auto& f = grid();
  auto cfg = f.inst.config;
  cfg.parallel = st.range(0) != 0;
  for (auto _ : st) {
    auto trace = sodta::run(f.problem, cfg);
    st.counters["iterations"] = static_cast<double>(trace.iterations);
  }
}

}  // namespace

BENCHMARK(BM_SuperstepSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SuperstepParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FullSolve)->Arg(0)->Arg(1)->Unit(benchmark::kSecond)->Iterations(1);

BENCHMARK_MAIN();
