#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "orbitedge/scenario.hpp"

// Builds problem instances from a scenario and runs the named experiments,
// producing CSV/JSON artifacts. Every random choice derives from the
// scenario seed.
namespace orbitedge::experiments {

enum class Experiment { kValidate, kObserve, kTurbulenceMc, kCapacity, kPipeline, kSweep };
Experiment parse_experiment(const std::string& name);
std::string to_string(Experiment e);

// Targets described by the scenario's target section.
std::vector<geometry::Target> generate_targets(const scenario::Scenario& s);
// `count` targets scattered within max_offset_km of the first observer's
// ground track between t_begin and t_end.
std::vector<geometry::Target> track_targets(const geometry::ConstellationSpec& cs, int count, double t_begin,
                                            double t_end, double max_offset_km, std::uint64_t seed);
std::vector<geometry::Target> box_targets(int count, double lat_min, double lat_max, double lon_min, double lon_max,
                                          std::uint64_t seed);

// Visibility, discretization and normalization for one horizon.
obs::SchedulingInstance make_instance(const geometry::ConstellationSpec& cs, const std::vector<geometry::Target>& targets,
                                      const acquisition::AgilitySpec& agility, double t_begin, double t_end,
                                      double max_off_nadir_deg, double step_s);

// Contended single-pass instance: `n_targets` in a box centred on the first
// observer's ground track at the middle of the observe horizon.
obs::SchedulingInstance observe_instance(const scenario::Scenario& s, int n_targets, int index);

// The executed observation sequence of the pipeline episode: scheduled per
// STH over the horizon, time ordered and truncated to max_observations.
std::vector<obs::ScheduledObservation> episode_observations(const scenario::Scenario& s);
pipeline::EpisodeConfig episode_config(const scenario::Scenario& s);

// Multi-observer constellation and per-STH instances for rescheduling.
struct RescheduleSetup {
  geometry::ConstellationSpec constellation;
  std::vector<geometry::Target> targets;
  std::vector<int> target_ids;
  std::vector<obs::SchedulingInstance> instances;
};
RescheduleSetup reschedule_setup(const scenario::Scenario& s);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<obs::SolverKind> solver;
  std::optional<int> replicas;
};
scenario::Scenario apply_overrides(scenario::Scenario s, const Overrides& o);

struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  nlohmann::json summary;
  bool ok = true;  // false when an experiment-level check failed (reported, not thrown)
};

Artifacts run_experiment(const scenario::Scenario& s, Experiment e);
// Writes every artifact under dir (created if needed) and returns the paths.
std::vector<std::string> write_artifacts(const Artifacts& a, const std::string& dir);

}  // namespace orbitedge::experiments
