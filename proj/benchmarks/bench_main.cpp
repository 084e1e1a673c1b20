#include <benchmark/benchmark.h>

#include "../tests/common/psch_instances.hpp"
#include "orbitedge/compute.hpp"
#include "orbitedge/experiments.hpp"
#include "orbitedge/obs_scheduler.hpp"
#include "orbitedge/oracle.hpp"
#include "orbitedge/pipeline.hpp"
#include "orbitedge/proc_scheduler.hpp"
#include "orbitedge/scenario.hpp"

using namespace orbitedge;

namespace {

const scenario::Scenario& baseline() {
  static const auto s = scenario::load_scenario(std::string(ORBITEDGE_DATA_DIR) + "/scenarios/worldview3_baseline.yaml");
  return s;
}

void BM_Visibility(benchmark::State& st) {
  const auto& s = baseline();
  const auto targets = experiments::generate_targets(s);
  for (auto _ : st)
    benchmark::DoNotOptimize(geometry::compute_visibility_windows(s.constellation, targets, s.observe.horizon_s,
                                                                  s.observe.max_off_nadir_deg));
}
BENCHMARK(BM_Visibility)->Unit(benchmark::kMillisecond);

void BM_SolveExact(benchmark::State& st) {
  const auto inst = experiments::observe_instance(baseline(), static_cast<int>(st.range(0)), 0);
  for (auto _ : st) benchmark::DoNotOptimize(obs::solve_exact(inst));
}
BENCHMARK(BM_SolveExact)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_SolveGa(benchmark::State& st) {
  const auto inst = experiments::observe_instance(baseline(), 80, 0);
  obs::GaOptions ga;
  for (auto _ : st) benchmark::DoNotOptimize(obs::solve_ga(inst, ga));
}
BENCHMARK(BM_SolveGa)->Unit(benchmark::kMillisecond);

void BM_SolveFifo(benchmark::State& st) {
  const auto inst = experiments::observe_instance(baseline(), 80, 0);
  for (auto _ : st) benchmark::DoNotOptimize(obs::solve_fifo(inst));
}
BENCHMARK(BM_SolveFifo);

void BM_ProcSolve(benchmark::State& st) {
  const auto inst = testdata::random_psch_instance(static_cast<std::uint64_t>(st.range(0)));
  for (auto _ : st) {
    try {
      benchmark::DoNotOptimize(proc::solve(inst));
    } catch (const std::exception&) {
    }
  }
}
BENCHMARK(BM_ProcSolve)->Arg(1)->Arg(2)->Arg(3);

void BM_ProcGridOracle(benchmark::State& st) {
  const auto inst = testdata::random_psch_instance(2);
  for (auto _ : st) benchmark::DoNotOptimize(oracle::grid_search_psch(inst, 0.01));
}
BENCHMARK(BM_ProcGridOracle)->Unit(benchmark::kMillisecond);

void BM_OptimalFrequency(benchmark::State& st) {
  const compute::WorkloadSpec w;
  const auto p = compute::jetson_agx();
  for (auto _ : st) benchmark::DoNotOptimize(compute::optimal_frequency(p, w, 113.0, 10.0));
}
BENCHMARK(BM_OptimalFrequency);

void BM_PipelineEpisode(benchmark::State& st) {
  const auto& s = baseline();
  auto cfg = experiments::episode_config(s);
  cfg.replicas = static_cast<int>(st.range(0));
  const auto acq = experiments::episode_observations(s);
  for (auto _ : st) benchmark::DoNotOptimize(pipeline::run(cfg, acq));
}
BENCHMARK(BM_PipelineEpisode)->Arg(20)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
