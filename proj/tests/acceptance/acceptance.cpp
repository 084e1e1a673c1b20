// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../common/psch_instances.hpp"
#include "orbitedge/acquisition.hpp"
#include "orbitedge/compute.hpp"
#include "orbitedge/errors.hpp"
#include "orbitedge/experiments.hpp"
#include "orbitedge/obs_scheduler.hpp"
#include "orbitedge/oracle.hpp"
#include "orbitedge/proc_scheduler.hpp"
#include "orbitedge/scenario.hpp"

using namespace orbitedge;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

bool near_rel(double value, double ref, double rel) { return std::abs(value - ref) <= rel * std::abs(ref); }

std::string baseline_path() { return std::string(ORBITEDGE_DATA_DIR) + "/scenarios/worldview3_baseline.yaml"; }

scenario::Scenario baseline() { return scenario::load_scenario(baseline_path()); }

std::string num(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

Outcome platform_speeds() {
  const compute::WorkloadSpec w;
  const double fps[4] = {compute::cloud_cpu().max_fps(w.work_flops), compute::satellite_cpu().max_fps(w.work_flops),
                         compute::jetson_nano().max_fps(w.work_flops), compute::jetson_agx().max_fps(w.work_flops)};
  const double ref[4] = {62.377, 5.398, 17.231, 32.45};
  bool ok = true;
  std::string d;
  for (int i = 0; i < 4; ++i) {
    ok = ok && near_rel(fps[i], ref[i], 1e-3);
    d += (i ? " / " : "") + num(fps[i], 6);
  }
  return {ok, d + " FPS"};
}

Outcome attitude_law() {
  auto law = [](double a) {
    if (a <= 10) return 11.66;
    if (a <= 30) return 5 + a / 1.5;
    if (a <= 60) return 10 + a / 2;
    if (a <= 90) return 16 + a / 2.5;
    return 22 + a / 3;
  };
  bool ok = true;
  const double printed[5][2] = {{5, 11.66}, {20, 5 + 20 / 1.5}, {45, 32.5}, {75, 46.0}, {100, 22 + 100 / 3.0}};
  for (const auto& p : printed) ok = ok && std::abs(acquisition::transition_time_for_angle(p[0]) - p[1]) < 1e-12;
  int sides = 0;
  for (double b : {10.0, 30.0, 60.0, 90.0})
    for (double a : {b, std::nextafter(b, 0.0), b + 1e-9, b + 1e-6}) {
      ok = ok && std::abs(acquisition::transition_time_for_angle(a) - law(a)) < 1e-12;
      ++sides;
    }
  return {ok, "5 printed values, " + std::to_string(sides) + " boundary probes"};
}

Outcome exact_vs_enumeration() {
  int agree = 0, feasible = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto inst = oracle::random_small_instance(seed, 8, 6, 1 + seed % 3);
    const auto s = obs::solve_exact(inst);
    if (oracle::check_schedule(inst, s).empty()) ++feasible;
    if (std::abs(oracle::enumerate_aeossp(inst) - s.total_profit) <= 1e-9) ++agree;
  }
  return {agree == 100 && feasible == 100,
          std::to_string(agree) + "/100 equal, " + std::to_string(feasible) + "/100 feasible"};
}

Outcome baseline_ordering() {
  auto s = baseline();
  s.experiments.observe_target_counts = {120};
  s.experiments.observe_instances = 30;
  s.experiments.ga_seeds = 20;
  const auto a = experiments::run_experiment(s, experiments::Experiment::kObserve);
  const auto& c = a.summary["counts"][0];
  const double ex = c["exact_mean_profit"], ga = c["ga_mean_profit"], ff = c["fifo_mean_profit"];
  const double over = c["exact_over_fifo"];
  const int fb = c["exact_fallbacks"];
  const bool ok = ex + 1e-9 >= ga && ga + 1e-9 >= ff && over >= 0.30 && fb == 0;
  return {ok, "exact " + num(ex) + " ga " + num(ga) + " fifo " + num(ff) + ", exact/fifo +" + num(100 * over, 3) +
                  "%, exact/ga +" + num(100 * c["exact_over_ga"].get<double>(), 3) + "%, fallbacks " +
                  std::to_string(fb)};
}

Outcome turbulence_gating() {
  auto s = baseline();
  s.experiments.mc_realizations = 1000;
  const auto a = experiments::run_experiment(s, experiments::Experiment::kTurbulenceMc);
  const auto& j = a.summary;
  const auto& r = j["reschedule"];
  const double att = r["attempts_per_target"], frac = r["rescheduled_fraction"];
  const bool ok = s.turbulence.threshold == 2e-14 && j["precision_within_ci"].get<bool>() && att >= 1.3 &&
                  att <= 1.7 && frac >= 0.30 && frac <= 0.40;
  return {ok, "precision " + num(j["precision"].get<double>()) + " vs CDF " +
                  num(j["cdf_at_threshold"].get<double>()) + ", profit expected " +
                  num(j["expected_profit"].get<double>()) + " actual " + num(j["mean_actual_profit"].get<double>()) +
                  ", attempts " + num(att) + ", rescheduled " + num(100 * frac, 3) + "%"};
}

Outcome psch_optimality() {
  int compared = 0, checked = 0, bad = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; compared < 50 && seed < 500; ++seed) {
    const auto inst = testdata::random_psch_instance(seed);
    const auto grid = oracle::grid_search_psch(inst, 0.01);
    proc::AllocationPlan plan;
    bool solved = true;
    try {
      plan = proc::solve(inst);
    } catch (const InfeasibleAllocationError&) {
      solved = false;
    }
    if (solved) {
      ++checked;
      if (!oracle::evaluate_allocation(inst, plan.x, 1e-6).feasible) ++bad;
    }
    if (!grid.feasible) continue;
    if (!solved) {
      ++bad;
      continue;
    }
    const double e = oracle::evaluate_allocation(inst, plan.x, 1e-6).energy;
    worst = std::max(worst, e / grid.energy - 1.0);
    ++compared;
  }
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int convex_fail = 0;
  for (int k = 0; k < 10000; ++k) {
    const auto inst = testdata::random_psch_instance(1000 + k % 50);
    const auto caps = proc::processing_caps(inst);
    const std::size_t P = caps.size();
    std::vector<double> a(P), b(P), m(P);
    for (std::size_t p = 0; p < P; ++p) {
      a[p] = U(rng) * caps[p];
      b[p] = U(rng) * caps[p];
      m[p] = 0.5 * (a[p] + b[p]);
    }
    const double ea = proc::substituted_energy(inst, a), eb = proc::substituted_energy(inst, b);
    if (proc::substituted_energy(inst, m) > 0.5 * (ea + eb) * (1 + 1e-12) + 1e-12) ++convex_fail;
  }
  const bool ok = compared == 50 && bad == 0 && worst <= 0.01 && convex_fail == 0;
  return {ok, std::to_string(compared) + " grid comparisons, worst excess " + num(100 * worst, 3) + "%, " +
                  std::to_string(checked) + " plans checked (" + std::to_string(bad) + " bad), " +
                  std::to_string(convex_fail) + "/10000 convexity failures"};
}

Outcome capacity() {
  const auto s = baseline();
  const auto a = experiments::run_experiment(s, experiments::Experiment::kCapacity);
  double ground_fps = 0, ground_w = 0, cpu = 0, nano = 0, agx = 0;
  for (const auto& r : a.summary["rows"]) {
    const std::string cfg = r["config"], edge = r["edge_platform"];
    const double fps = r["fps"];
    if (cfg == "ground_only") {
      ground_fps = fps;
      ground_w = r["processing_power_w"];
    } else if (edge == "satellite_cpu") {
      cpu = fps;
    } else if (edge == "jetson_nano") {
      nano = fps;
    } else if (edge == "jetson_agx") {
      agx = fps;
    }
  }
  const bool ok = s.constellation.n_sats_edge == 23 && near_rel(cpu, 186.5, 0.005) && cpu < 200 &&
                  near_rel(nano, 458.7, 0.005) && near_rel(agx, 808.8, 0.02) && near_rel(ground_fps, 62.5, 0.05) &&
                  near_rel(ground_w, 250.0, 0.05);
  return {ok, "cpu " + num(cpu) + " nano " + num(nano) + " agx " + num(agx) + " FPS, raw downlink " +
                  num(ground_fps) + " FPS at " + num(ground_w) + " W"};
}

Outcome pipeline_episode() {
  auto s = baseline();
  const auto cfg = experiments::episode_config(s);
  const auto agx = experiments::run_experiment(s, experiments::Experiment::kPipeline);
  s.edge_platform = "jetson_nano";
  const auto nano = experiments::run_experiment(s, experiments::Experiment::kPipeline);
  const auto& j = agx.summary;
  const double dev = j["max_quantile_deviation"], trend = j["energy_trend_j_per_s"];
  const double ratio = nano.summary["mean_observation_energy_j"].get<double>() /
                       j["mean_observation_energy_j"].get<double>();
  const int n_obs = j["observations"];
  const bool setup = cfg.duration_s == 2000.0 && n_obs == 32 && cfg.frame.n_img == 2601 && cfg.t_slot == 10.0 &&
                     cfg.constellation.n_sats_edge == 23 && cfg.stations.stations.size() == 26 &&
                     cfg.edge_platform.id == "jetson_agx";
  const bool ok = setup && agx.ok && dev <= 0.02 && ratio >= 4.0 && trend > 0.0;
  return {ok, std::to_string(n_obs) + " observations, quantile deviation " + num(100 * dev, 3) +
                  "%, nano/agx " + num(ratio) + ", trend " + num(trend) + " J/s"};
}

Outcome sweep_frontier() {
  const auto s = baseline();
  const auto a = experiments::run_experiment(s, experiments::Experiment::kSweep);
  bool agx5 = false, cpu_ok = true, mono = true, plateau = true;
  double prev = std::numeric_limits<double>::infinity(), agx20 = 0.0;
  for (const auto& p : a.summary["points"]) {
    const std::string name = p["platform"];
    const double t = p["t_slot_s"];
    const bool feas = p["feasible"];
    if (name == "satellite_cpu" && t < 15 && feas) cpu_ok = false;
    if (name != "jetson_agx") continue;
    if (t == 5) agx5 = feas;
    if (!feas) {
      mono = false;
      continue;
    }
    const double w = p["mean_power_w"];
    if (w > prev * (1 + 1e-9)) mono = false;
    prev = w;
    if (t >= 20) {
      plateau = plateau && w <= 2.0;
      if (t == 20) agx20 = w;
    }
  }
  return {agx5 && cpu_ok && mono && plateau, std::string("agx@5s ") + (agx5 ? "feasible" : "infeasible") +
                                                 ", cpu<15s " + (cpu_ok ? "infeasible" : "feasible") +
                                                 ", agx monotone " + (mono ? "yes" : "no") + ", agx@20s " +
                                                 num(agx20) + " W"};
}

Outcome determinism() {
  const auto s = baseline();
  std::size_t files = 0;
  for (auto e : {experiments::Experiment::kPipeline, experiments::Experiment::kCapacity,
                 experiments::Experiment::kSweep}) {
    const auto a = experiments::run_experiment(s, e);
    const auto b = experiments::run_experiment(s, e);
    if (a.files.size() != b.files.size()) return {false, experiments::to_string(e) + " file count differs"};
    for (std::size_t i = 0; i < a.files.size(); ++i) {
      if (a.files[i] != b.files[i]) return {false, a.files[i].first + " differs"};
      ++files;
    }
  }
  return {true, std::to_string(files) + " CSV files byte-identical"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"platform max speeds", platform_speeds},
      {"attitude transition law", attitude_law},
      {"exact solver vs enumeration", exact_vs_enumeration},
      {"exact >= GA >= FIFO on 120 targets", baseline_ordering},
      {"turbulence gating and rescheduling", turbulence_gating},
      {"processing allocation optimality", psch_optimality},
      {"supported load per architecture", capacity},
      {"pipeline episode energy", pipeline_episode},
      {"slot duration sweep", sweep_frontier},
      {"determinism", determinism},
  };
  int failed = 0, k = 0;
  for (const auto& [name, fn] : criteria) {
    ++k;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", k, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
