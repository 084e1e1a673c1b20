#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "orbitedge/acquisition.hpp"
#include "orbitedge/atmosphere.hpp"
#include "orbitedge/compute.hpp"
#include "orbitedge/geometry.hpp"
#include "orbitedge/network.hpp"
#include "orbitedge/obs_scheduler.hpp"
#include "orbitedge/proc_scheduler.hpp"

// Slotted simulation of capture, scatter, edge processing and gather: an
// observation captured in slot k is scattered in k, processed in k+1 and
// gathered in k+2.
namespace orbitedge::pipeline {

enum Category : int {
  kManeuver = 0,
  kScatterIsl,
  kScatterDl,
  kProcessingEdge,
  kProcessingGround,
  kGatherIsl,
  kGatherDl,
  kCategoryCount
};
const char* category_name(int c);

struct EnergyLedger {
  std::array<double, kCategoryCount> joules{};
  double total() const;
  double total_without_maneuver() const;
  EnergyLedger& operator+=(const EnergyLedger& o);
};

struct GsSelection {
  int station_id = -1;
  int sat = -1;
  double rate_bps = 0.0;
  double snr = 0.0;
  double slant_m = 0.0;
  double elevation_deg = 0.0;
  bool in_contact() const { return station_id >= 0 && rate_bps > 0.0; }
};

// Station/satellite pair with the highest downlink rate at time t; ties go to
// higher SNR, then lower station id, then lower satellite index.
GsSelection select_gs(const geometry::ConstellationSpec& spec, const geometry::GroundStationSet& gs,
                      const network::LinkSpec& link, double t);

struct EpisodeConfig {
  geometry::ConstellationSpec constellation;
  geometry::GroundStationSet stations;
  network::LinkSpec link;
  compute::PlatformSpec edge_platform = compute::jetson_agx();
  compute::PlatformSpec ground_platform = compute::cloud_cpu();
  bool use_ground = true;
  bool use_edge = true;
  compute::WorkloadSpec workload;
  acquisition::FrameSpec frame;
  atmosphere::TurbulenceModel turbulence;
  bool turbulence_gate = false;
  double t_slot = 10.0;
  double duration_s = 2000.0;
  proc::DownlinkConvention convention = proc::DownlinkConvention::kSplit;
  int replicas = 200;
  std::uint64_t seed = 1;
  compute::SyntheticLogSpec exec_log;
  std::string exec_log_csv;  // optional measured log for the edge platform

  void validate() const;
};

struct ObservationRecord {
  int index = 0;
  acquisition::ObservationWindow otw;
  int slot = 0;
  int overlap = 0;  // other observations captured in the same slot
  bool feasible = false;
  std::string failure;
  GsSelection gs_scatter;
  GsSelection gs_gather;
  std::vector<double> x;
  std::vector<int> images;  // integer apportionment, edge first then ground
  std::vector<double> f_hz;
  double planned_energy_j = 0.0;
  // Over replicas (accepted ones when gating).
  int accepted = 0;
  int delivered = 0;
  EnergyLedger mean;
  double energy_mean = 0.0;  // excluding maneuver
  double energy_q05 = 0.0;
  double energy_q95 = 0.0;
  double t_delay_mean = 0.0;
};

struct SlotRecord {
  int slot = 0;
  std::vector<int> captured;
  GsSelection gs;
  double scatter_bits = 0.0;
  double gather_bits = 0.0;
  int busy_nodes = 0;  // processors with a batch in this slot
  EnergyLedger energy;  // mean over replicas, attributed to the slot where spent
  int delivered = 0;    // summed over replicas
  int failed = 0;
};

struct RunResult {
  std::vector<ObservationRecord> observations;
  std::vector<SlotRecord> slots;
  EnergyLedger ledger;  // mean per replica
  double duration_s = 0.0;
  double mean_power_w = 0.0;  // ledger without maneuver / duration
  bool all_feasible = true;
  int dropped = 0;
  double delivered_fraction = 0.0;
};

// `observations` is the executed sequence (time ordered) with its maneuver
// energies, as produced by the observation scheduler.
RunResult run(const EpisodeConfig& cfg, const std::vector<obs::ScheduledObservation>& observations);

struct SweepPoint {
  std::string platform;
  double t_slot = 0.0;
  double mean_power_w = 0.0;
  bool feasible = false;
  int dropped = 0;
  double delivered_fraction = 0.0;
};

std::vector<SweepPoint> sweep(const EpisodeConfig& base, const std::vector<obs::ScheduledObservation>& observations,
                              const std::vector<compute::PlatformSpec>& platforms,
                              const std::vector<double>& t_slots);

std::string observations_csv(const RunResult& r);
std::string slots_csv(const RunResult& r);
std::string sweep_csv(const std::vector<SweepPoint>& pts);
nlohmann::json summary_json(const EpisodeConfig& cfg, const RunResult& r);

// Linear-interpolated sample quantile (q in [0,1]).
double sample_quantile(std::vector<double> v, double q);

}  // namespace orbitedge::pipeline
