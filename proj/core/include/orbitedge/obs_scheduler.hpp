#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "orbitedge/acquisition.hpp"
#include "orbitedge/atmosphere.hpp"

#include <nlohmann/json_fwd.hpp>

// Agile observation scheduling: choose and sequence OTWs to maximize total
// profit subject to window, slew-time, maneuver-energy and target-uniqueness
// constraints.
namespace orbitedge::obs {

using acquisition::AgilitySpec;
using acquisition::ObservationWindow;

struct SchedulingInstance {
  std::vector<ObservationWindow> otws;
  AgilitySpec agility;
  double sth_start = 0.0;
  double sth_end = 0.0;
  std::vector<int> satellites;

  // Sorts OTWs by (sat, tau, id), fills `satellites` if empty and checks the
  // OTWs against their windows and the horizon. Throws ConfigError.
  void normalize();
  std::vector<int> target_ids() const;
  std::size_t target_count() const { return target_ids().size(); }
};

struct ScheduledObservation {
  ObservationWindow otw;
  double transition_s = 0.0;       // slew from the previous OTW of this satellite
  double maneuver_energy_j = 0.0;  // P_man * transition_s
};

struct SatelliteSequence {
  int sat_id = 0;
  std::vector<ScheduledObservation> items;
  double maneuver_energy_j = 0.0;
  double completion_time() const { return items.empty() ? 0.0 : items.back().otw.timestamp; }
};

struct ObservationSchedule {
  std::vector<SatelliteSequence> sequences;
  double total_profit = 0.0;
  double maneuver_energy_j = 0.0;

  // All selected OTWs, ordered by timestamp.
  std::vector<ObservationWindow> flattened() const;
  // Immediate-successor pairs (OTW id, OTW id) per satellite.
  std::vector<std::pair<int, int>> successor_pairs() const;
  std::size_t size() const;
  double completion_time() const;
};

// Builds a schedule (transition times, energies, totals) from per-satellite
// lists of OTWs already in time order. No feasibility checking.
ObservationSchedule make_schedule(const SchedulingInstance& inst,
                                  const std::vector<std::vector<ObservationWindow>>& chains);

// Orders equal-profit schedules: earlier completion, then lexicographic ids.
bool better_schedule(const ObservationSchedule& a, const ObservationSchedule& b);

struct ExactOptions {
  std::size_t max_targets = 400;
  std::size_t max_otws = 8000;
  std::size_t max_labels = 6'000'000;
  std::size_t max_nodes = 20'000;
};

ObservationSchedule solve_exact(const SchedulingInstance& inst, const ExactOptions& opts = {});

ObservationSchedule solve_fifo(const SchedulingInstance& inst);

struct GaOptions {
  int population = 20;
  int generations = 100;
  double p_crossover = 0.2;
  double p_mutation = 0.2;
  std::uint64_t seed = 1;
};

ObservationSchedule solve_ga(const SchedulingInstance& inst, const GaOptions& opts = {});

enum class SolverKind { kExact, kGa, kFifo };
SolverKind parse_solver(const std::string& name);
std::string to_string(SolverKind kind);

// Solves with the requested backend; exact falls back to GA when the
// instance exceeds the exact caps.
ObservationSchedule solve(const SchedulingInstance& inst, SolverKind kind, const GaOptions& ga = {},
                          const ExactOptions& exact = {}, bool* fell_back = nullptr);

struct RescheduleOptions {
  SolverKind solver = SolverKind::kExact;
  GaOptions ga;
  ExactOptions exact;
};

struct TargetRecord {
  int target_id = 0;
  int attempts = 0;
  bool acquired = false;
  int acquired_in_sth = -1;
};

struct SthOutcome {
  int sth = 0;
  ObservationSchedule schedule;
  std::vector<double> cn2;      // one draw per executed OTW, in flattened order
  std::vector<char> accepted;
  double expected_profit = 0.0;
  double actual_profit = 0.0;
  bool fell_back_to_ga = false;
};

struct RescheduleResult {
  std::vector<SthOutcome> steps;
  std::vector<TargetRecord> targets;
  double total_actual_profit = 0.0;
  double success_fraction = 0.0;      // acquired / all targets
  double rescheduled_fraction = 0.0;  // targets whose first attempt failed / all targets
  double attempts_per_target = 0.0;   // attempts / targets attempted at least once
};

// Runs consecutive horizons; a target leaves the pool once an executed
// observation of it passes the turbulence gate.
RescheduleResult reschedule_across_sth(const std::vector<SchedulingInstance>& instances,
                                       const std::vector<int>& target_ids,
                                       atmosphere::Cn2Sampler& sampler,
                                       const RescheduleOptions& opts = {});

// JSON import/export and plot-ready CSV.
nlohmann::json instance_to_json(const SchedulingInstance& inst);
SchedulingInstance instance_from_json(const nlohmann::json& j);
nlohmann::json schedule_to_json(const ObservationSchedule& s);
std::string schedule_to_csv(const ObservationSchedule& s);

}  // namespace orbitedge::obs
