#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orbitedge/acquisition.hpp"
#include "orbitedge/atmosphere.hpp"
#include "orbitedge/compute.hpp"
#include "orbitedge/geometry.hpp"
#include "orbitedge/network.hpp"
#include "orbitedge/obs_scheduler.hpp"
#include "orbitedge/pipeline.hpp"
#include "orbitedge/proc_scheduler.hpp"

// Scenario files: one YAML (or JSON) document describing the constellation,
// payload, links, ground segment and experiment settings.
namespace orbitedge::scenario {

struct TargetSpec {
  enum class Mode { kTrack, kBox, kList };
  Mode mode = Mode::kTrack;
  int count = 40;
  // kTrack: targets scattered along the observer's ground track.
  double track_begin_s = 0.0;
  double track_end_s = 2000.0;
  double max_offset_km = 150.0;
  // kBox: uniform in a latitude/longitude box.
  double lat_min = 55.0, lat_max = 65.0;
  double lon_min = -5.0, lon_max = 5.0;
  std::vector<geometry::Target> list;
};

struct ObserveSpec {
  double horizon_s = 2000.0;
  double sth_s = 1600.0;
  int max_observations = 32;
  obs::SolverKind solver = obs::SolverKind::kExact;
  obs::ExactOptions exact;
  obs::GaOptions ga;
  double visibility_step_s = 1.0;
  double max_off_nadir_deg = 45.0;
};

struct PipelineSpec {
  double t_slot_s = 10.0;
  int replicas = 200;
  bool turbulence_gate = false;
  proc::DownlinkConvention convention = proc::DownlinkConvention::kSplit;
  std::string exec_log_file;
  double exec_cv = 0.12;
};

struct ExperimentSpec {
  // observe
  std::vector<int> observe_target_counts{80, 100, 120, 140};
  int observe_instances = 3;
  int ga_seeds = 20;
  // Contended instances: one observer pass over a box this many degrees
  // wide, centred on the ground track at the middle of the horizon.
  double observe_box_lat_deg = 20.0;
  double observe_box_lon_deg = 12.0;
  double observe_horizon_s = 1600.0;
  // turbulence-mc
  int mc_realizations = 1000;
  int reschedule_targets = 150;
  int reschedule_sth = 10;
  double reschedule_sth_s = 0.0;  // 0: one orbital period
  int walker_planes = 4;
  double reschedule_box_lat_deg = 30.0;
  double reschedule_box_lon_deg = 40.0;
  double reschedule_center_lat = 45.0;
  double reschedule_center_lon = 10.0;
  // sweep
  std::vector<double> sweep_t_slots{5, 10, 15, 20, 25, 30, 35, 40};
  std::vector<std::string> sweep_platforms{"satellite_cpu", "jetson_nano", "jetson_agx"};
  int sweep_replicas = 20;
  // capacity
  double capacity_fps_load = 60.0;
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::string base_dir = ".";  // directory relative paths resolve against

  geometry::ConstellationSpec constellation;
  acquisition::AgilitySpec agility;
  acquisition::FrameSpec frame;
  compute::WorkloadSpec workload;
  std::string edge_platform = "jetson_agx";
  std::string ground_platform = "cloud_cpu";
  bool use_ground = true;
  std::vector<compute::PlatformSpec> custom_platforms;

  network::LinkSpec link;
  std::string modcod_file;  // empty: built-in table

  std::string stations_file;
  double station_min_elevation_deg = 5.0;
  geometry::GroundStationSet stations;  // loaded from stations_file

  atmosphere::TurbulenceModel turbulence;
  std::string cn2_cdf_file;  // required for the empirical model

  TargetSpec targets;
  ObserveSpec observe;
  PipelineSpec pipeline;
  ExperimentSpec experiments;

  // Looks up a platform by name among custom entries, then the catalog.
  compute::PlatformSpec platform(const std::string& name) const;
  std::string resolve(const std::string& path) const;
};

// Parses, loads referenced files and validates. Collects every problem into
// one ValidationError; YAML syntax errors carry line/column.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text, const std::string& base_dir = ".",
                        const std::string& source_name = "<string>");
// YAML text that load_scenario reads back to an identical scenario.
std::string save_scenario(const Scenario& s);

geometry::GroundStationSet load_ground_stations_csv(const std::string& path, double default_min_elevation_deg = 5.0);

}  // namespace orbitedge::scenario
