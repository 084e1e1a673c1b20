#include "orbitedge/scenario.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "orbitedge/errors.hpp"

namespace orbitedge::scenario {

namespace fs = std::filesystem;

compute::PlatformSpec Scenario::platform(const std::string& name) const {
  for (const auto& p : custom_platforms)
    if (p.id == name) return p;
  return compute::platform_by_name(name);
}

std::string Scenario::resolve(const std::string& path) const {
  if (path.empty()) return path;
  fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

geometry::GroundStationSet load_ground_stations_csv(const std::string& path, double default_min_elevation_deg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open ground station file: " + path);
  geometry::GroundStationSet set;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
    if (cols.size() < 4) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected id,name,lat,lon[,min_el]");
    geometry::GroundStation st;
    try {
      std::size_t used = 0;
      st.id = std::stoi(cols[0], &used);
    } catch (const std::exception&) {
      continue;  // header
    }
    try {
      st.name = cols[1];
      st.lat_deg = std::stod(cols[2]);
      st.lon_deg = std::stod(cols[3]);
      st.min_elevation_deg = cols.size() > 4 && !cols[4].empty() ? std::stod(cols[4]) : default_min_elevation_deg;
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": bad number");
    }
    set.stations.push_back(st);
  }
  if (set.stations.empty()) throw ConfigError("no ground stations in " + path);
  return set;
}

namespace {

// Walks a YAML tree, recording every problem with its dotted field path and
// source line instead of stopping at the first.
class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  void problem(const YAML::Node& n, const std::string& path, const std::string& msg) {
    std::string where = source_;
    if (n && n.Mark().line >= 0) where += ":" + std::to_string(n.Mark().line + 1);
    problems.push_back(where + ": " + path + ": " + msg);
  }
  void problem(const std::string& path, const std::string& msg) { problems.push_back(path + ": " + msg); }

  template <class T>
  void get(const YAML::Node& parent, const std::string& key, T& out, const std::string& path) {
    if (!parent || !parent.IsMap()) return;
    YAML::Node n = parent[key];
    if (!n) return;
    try {
      out = n.as<T>();
    } catch (const YAML::Exception&) {
      problem(n, join(path, key), "cannot convert '" + (n.IsScalar() ? n.Scalar() : std::string("<non-scalar>")) + "'");
    }
  }

  YAML::Node section(const YAML::Node& parent, const std::string& key, const std::string& path,
                     std::initializer_list<const char*> allowed) {
    if (!parent || !parent.IsMap()) return YAML::Node();
    YAML::Node n = parent[key];
    if (!n) return YAML::Node();
    if (!n.IsMap()) {
      problem(n, join(path, key), "expected a mapping");
      return YAML::Node();
    }
    check_keys(n, join(path, key), allowed);
    return n;
  }

  void check_keys(const YAML::Node& n, const std::string& path, std::initializer_list<const char*> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : n) {
      auto k = kv.first.as<std::string>();
      if (!ok.count(k)) problem(kv.first, join(path, k), "unknown field");
    }
  }

  static std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

  std::vector<std::string> problems;

 private:
  std::string source_;
};

const char* kind_name(compute::NodeKind k) { return k == compute::NodeKind::kGround ? "ground" : "satellite"; }

std::string mode_name(TargetSpec::Mode m) {
  switch (m) {
    case TargetSpec::Mode::kTrack: return "track";
    case TargetSpec::Mode::kBox: return "box";
    case TargetSpec::Mode::kList: return "list";
  }
  return "track";
}

void read_constellation(Reader& r, const YAML::Node& root, geometry::ConstellationSpec& c) {
  auto n = r.section(root, "constellation", "",
                     {"n_sats_edge", "altitude_km", "inclination_deg", "n_planes", "raan_deg", "phase_offset_deg",
                      "cohosted_observer", "obs_sats"});
  if (!n) return;
  r.get(n, "n_sats_edge", c.n_sats_edge, "constellation");
  r.get(n, "altitude_km", c.altitude_e_km, "constellation");
  r.get(n, "inclination_deg", c.inclination_e_deg, "constellation");
  r.get(n, "n_planes", c.n_planes, "constellation");
  r.get(n, "raan_deg", c.raan_e_deg, "constellation");
  r.get(n, "phase_offset_deg", c.phase_offset_e_deg, "constellation");
  r.get(n, "cohosted_observer", c.cohosted_observer, "constellation");
  if (auto obs = n["obs_sats"]) {
    if (!obs.IsSequence()) {
      r.problem(obs, "constellation.obs_sats", "expected a list");
    } else {
      c.obs_sats.clear();
      for (std::size_t i = 0; i < obs.size(); ++i) {
        std::string p = "constellation.obs_sats[" + std::to_string(i) + "]";
        if (!obs[i].IsMap()) {
          r.problem(obs[i], p, "expected a mapping");
          continue;
        }
        r.check_keys(obs[i], p, {"altitude_km", "inclination_deg", "raan_deg", "phase_deg"});
        geometry::OrbitalElements el;
        r.get(obs[i], "altitude_km", el.altitude_km, p);
        r.get(obs[i], "inclination_deg", el.inclination_deg, p);
        r.get(obs[i], "raan_deg", el.raan_deg, p);
        r.get(obs[i], "phase_deg", el.phase_deg, p);
        c.obs_sats.push_back(el);
      }
    }
  }
}

void read_platforms(Reader& r, const YAML::Node& root, Scenario& s) {
  auto n = r.section(root, "platforms", "", {"edge", "ground", "use_ground", "custom"});
  if (!n) return;
  r.get(n, "edge", s.edge_platform, "platforms");
  r.get(n, "ground", s.ground_platform, "platforms");
  r.get(n, "use_ground", s.use_ground, "platforms");
  auto custom = n["custom"];
  if (!custom) return;
  if (!custom.IsSequence()) {
    r.problem(custom, "platforms.custom", "expected a list");
    return;
  }
  s.custom_platforms.clear();
  for (std::size_t i = 0; i < custom.size(); ++i) {
    std::string p = "platforms.custom[" + std::to_string(i) + "]";
    const auto& c = custom[i];
    if (!c.IsMap()) {
      r.problem(c, p, "expected a mapping");
      continue;
    }
    r.check_keys(c, p, {"id", "n_cores", "f_max_hz", "p_max_w", "flops_per_cycle", "mu_c", "mu_sync_s", "kind"});
    compute::PlatformSpec ps;
    r.get(c, "id", ps.id, p);
    r.get(c, "n_cores", ps.n_cores, p);
    r.get(c, "f_max_hz", ps.f_max_hz, p);
    r.get(c, "p_max_w", ps.p_max_w, p);
    r.get(c, "flops_per_cycle", ps.flops_per_cycle, p);
    r.get(c, "mu_c", ps.mu_c, p);
    r.get(c, "mu_sync_s", ps.mu_sync_s, p);
    std::string kind = "satellite";
    r.get(c, "kind", kind, p);
    if (kind == "ground") ps.kind = compute::NodeKind::kGround;
    else if (kind != "satellite") r.problem(c["kind"], p + ".kind", "expected 'satellite' or 'ground'");
    if (ps.id.empty()) r.problem(c, p + ".id", "required");
    s.custom_platforms.push_back(ps);
  }
}

void read_targets(Reader& r, const YAML::Node& root, TargetSpec& t) {
  auto n = r.section(root, "targets", "",
                     {"mode", "count", "track_begin_s", "track_end_s", "max_offset_km", "lat_min", "lat_max",
                      "lon_min", "lon_max", "list"});
  if (!n) return;
  std::string mode = mode_name(t.mode);
  r.get(n, "mode", mode, "targets");
  if (mode == "track") t.mode = TargetSpec::Mode::kTrack;
  else if (mode == "box") t.mode = TargetSpec::Mode::kBox;
  else if (mode == "list") t.mode = TargetSpec::Mode::kList;
  else r.problem(n["mode"], "targets.mode", "expected track, box or list");
  r.get(n, "count", t.count, "targets");
  r.get(n, "track_begin_s", t.track_begin_s, "targets");
  r.get(n, "track_end_s", t.track_end_s, "targets");
  r.get(n, "max_offset_km", t.max_offset_km, "targets");
  r.get(n, "lat_min", t.lat_min, "targets");
  r.get(n, "lat_max", t.lat_max, "targets");
  r.get(n, "lon_min", t.lon_min, "targets");
  r.get(n, "lon_max", t.lon_max, "targets");
  if (auto l = n["list"]) {
    if (!l.IsSequence()) {
      r.problem(l, "targets.list", "expected a list");
      return;
    }
    t.list.clear();
    for (std::size_t i = 0; i < l.size(); ++i) {
      std::string p = "targets.list[" + std::to_string(i) + "]";
      if (!l[i].IsMap()) {
        r.problem(l[i], p, "expected a mapping");
        continue;
      }
      r.check_keys(l[i], p, {"id", "lat_deg", "lon_deg"});
      geometry::Target tg;
      tg.id = static_cast<int>(i);
      r.get(l[i], "id", tg.id, p);
      r.get(l[i], "lat_deg", tg.lat_deg, p);
      r.get(l[i], "lon_deg", tg.lon_deg, p);
      t.list.push_back(tg);
    }
    if (t.mode == TargetSpec::Mode::kList) t.count = static_cast<int>(t.list.size());
  }
}

void read_observe(Reader& r, const YAML::Node& root, ObserveSpec& o) {
  auto n = r.section(root, "observe", "",
                     {"horizon_s", "sth_s", "max_observations", "solver", "exact", "ga", "visibility_step_s",
                      "max_off_nadir_deg"});
  if (!n) return;
  r.get(n, "horizon_s", o.horizon_s, "observe");
  r.get(n, "sth_s", o.sth_s, "observe");
  r.get(n, "max_observations", o.max_observations, "observe");
  std::string solver = obs::to_string(o.solver);
  r.get(n, "solver", solver, "observe");
  try {
    o.solver = obs::parse_solver(solver);
  } catch (const Error&) {
    r.problem(n["solver"], "observe.solver", "expected exact, ga or fifo");
  }
  r.get(n, "visibility_step_s", o.visibility_step_s, "observe");
  r.get(n, "max_off_nadir_deg", o.max_off_nadir_deg, "observe");
  if (auto e = r.section(n, "exact", "observe", {"max_targets", "max_otws", "max_labels", "max_nodes"})) {
    r.get(e, "max_targets", o.exact.max_targets, "observe.exact");
    r.get(e, "max_otws", o.exact.max_otws, "observe.exact");
    r.get(e, "max_labels", o.exact.max_labels, "observe.exact");
    r.get(e, "max_nodes", o.exact.max_nodes, "observe.exact");
  }
  if (auto g = r.section(n, "ga", "observe", {"population", "generations", "p_crossover", "p_mutation"})) {
    r.get(g, "population", o.ga.population, "observe.ga");
    r.get(g, "generations", o.ga.generations, "observe.ga");
    r.get(g, "p_crossover", o.ga.p_crossover, "observe.ga");
    r.get(g, "p_mutation", o.ga.p_mutation, "observe.ga");
  }
}

void read_pipeline(Reader& r, const YAML::Node& root, PipelineSpec& p) {
  auto n = r.section(root, "pipeline", "",
                     {"t_slot_s", "replicas", "turbulence_gate", "downlink_convention", "exec_log_file", "exec_cv"});
  if (!n) return;
  r.get(n, "t_slot_s", p.t_slot_s, "pipeline");
  r.get(n, "replicas", p.replicas, "pipeline");
  r.get(n, "turbulence_gate", p.turbulence_gate, "pipeline");
  std::string conv = p.convention == proc::DownlinkConvention::kSplit ? "split" : "shared";
  r.get(n, "downlink_convention", conv, "pipeline");
  if (conv == "split") p.convention = proc::DownlinkConvention::kSplit;
  else if (conv == "shared") p.convention = proc::DownlinkConvention::kShared;
  else r.problem(n["downlink_convention"], "pipeline.downlink_convention", "expected split or shared");
  r.get(n, "exec_log_file", p.exec_log_file, "pipeline");
  r.get(n, "exec_cv", p.exec_cv, "pipeline");
}

void read_experiments(Reader& r, const YAML::Node& root, ExperimentSpec& e) {
  auto n = r.section(root, "experiments", "",
                     {"observe_target_counts", "observe_instances", "ga_seeds", "observe_box_lat_deg",
                      "observe_box_lon_deg", "observe_horizon_s", "mc_realizations", "reschedule_targets",
                      "reschedule_sth", "reschedule_sth_s", "walker_planes", "reschedule_box_lat_deg", "reschedule_box_lon_deg",
                      "reschedule_center_lat", "reschedule_center_lon", "sweep_t_slots", "sweep_platforms",
                      "sweep_replicas", "capacity_fps_load"});
  if (!n) return;
  const std::string p = "experiments";
  r.get(n, "observe_target_counts", e.observe_target_counts, p);
  r.get(n, "observe_instances", e.observe_instances, p);
  r.get(n, "ga_seeds", e.ga_seeds, p);
  r.get(n, "observe_box_lat_deg", e.observe_box_lat_deg, p);
  r.get(n, "observe_box_lon_deg", e.observe_box_lon_deg, p);
  r.get(n, "observe_horizon_s", e.observe_horizon_s, p);
  r.get(n, "mc_realizations", e.mc_realizations, p);
  r.get(n, "reschedule_targets", e.reschedule_targets, p);
  r.get(n, "reschedule_sth", e.reschedule_sth, p);
  r.get(n, "reschedule_sth_s", e.reschedule_sth_s, p);
  r.get(n, "walker_planes", e.walker_planes, p);
  r.get(n, "reschedule_box_lat_deg", e.reschedule_box_lat_deg, p);
  r.get(n, "reschedule_box_lon_deg", e.reschedule_box_lon_deg, p);
  r.get(n, "reschedule_center_lat", e.reschedule_center_lat, p);
  r.get(n, "reschedule_center_lon", e.reschedule_center_lon, p);
  r.get(n, "sweep_t_slots", e.sweep_t_slots, p);
  r.get(n, "sweep_platforms", e.sweep_platforms, p);
  r.get(n, "sweep_replicas", e.sweep_replicas, p);
  r.get(n, "capacity_fps_load", e.capacity_fps_load, p);
}

template <class F>
void collect(std::vector<std::string>& problems, const std::string& what, F&& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    for (const auto& p : e.problems()) problems.push_back(what + ": " + p);
  } catch (const std::exception& e) {
    problems.push_back(what + ": " + e.what());
  }
}

void validate(Scenario& s, std::vector<std::string>& problems) {
  collect(problems, "constellation", [&] { s.constellation.validate(); });
  collect(problems, "agility", [&] { s.agility.validate(); });
  collect(problems, "frame", [&] { s.frame.validate(); });
  if (!(s.workload.rho >= 1.0))
    problems.push_back("workload.rho: must be >= 1 (got " + std::to_string(s.workload.rho) + ")");
  else
    collect(problems, "workload", [&] { s.workload.validate(); });
  for (const auto& p : s.custom_platforms) collect(problems, "platforms.custom " + p.id, [&] { p.validate(); });
  collect(problems, "platforms.edge", [&] { s.platform(s.edge_platform).validate(); });
  if (s.use_ground) collect(problems, "platforms.ground", [&] { s.platform(s.ground_platform).validate(); });
  for (const auto& name : s.experiments.sweep_platforms)
    collect(problems, "experiments.sweep_platforms", [&] { s.platform(name); });

  if (s.link.mode == network::ThresholdMode::kTable && !s.modcod_file.empty()) {
    auto path = s.resolve(s.modcod_file);
    if (!fs::exists(path))
      problems.push_back("link.modcod_file: file not found: " + path);
    else
      collect(problems, "link.modcod_file", [&] { s.link.modcods = network::load_modcod_csv(path); });
  }
  collect(problems, "link", [&] { s.link.validate(); });

  if (s.stations_file.empty()) {
    problems.push_back("ground_stations.file: required");
  } else {
    auto path = s.resolve(s.stations_file);
    if (!fs::exists(path))
      problems.push_back("ground_stations.file: file not found: " + path);
    else
      collect(problems, "ground_stations", [&] {
        s.stations = load_ground_stations_csv(path, s.station_min_elevation_deg);
        s.stations.validate();
      });
  }

  if (s.turbulence.kind == atmosphere::TurbulenceModel::Kind::kEmpirical) {
    if (s.cn2_cdf_file.empty()) {
      problems.push_back("turbulence.cdf_file: required for the empirical model");
    } else {
      auto path = s.resolve(s.cn2_cdf_file);
      if (!fs::exists(path))
        problems.push_back("turbulence.cdf_file: file not found: " + path);
      else
        collect(problems, "turbulence.cdf_file", [&] { s.turbulence.empirical = atmosphere::EmpiricalCdf::load_csv(path); });
    }
  }
  collect(problems, "turbulence", [&] { s.turbulence.validate(); });

  const auto& t = s.targets;
  if (t.mode == TargetSpec::Mode::kList && t.list.empty()) problems.push_back("targets.list: empty");
  if (t.mode != TargetSpec::Mode::kList && t.count < 1) problems.push_back("targets.count: must be >= 1");
  if (t.mode == TargetSpec::Mode::kBox && (!(t.lat_min < t.lat_max) || !(t.lon_min < t.lon_max)))
    problems.push_back("targets: box bounds must satisfy min < max");
  if (t.mode == TargetSpec::Mode::kTrack && (!(t.track_begin_s < t.track_end_s) || !(t.max_offset_km >= 0)))
    problems.push_back("targets: track window must satisfy begin < end and offset >= 0");
  for (const auto& tg : t.list)
    if (std::abs(tg.lat_deg) > 90.0) problems.push_back("targets.list: latitude out of range for id " + std::to_string(tg.id));

  const auto& o = s.observe;
  if (!(o.horizon_s > 0)) problems.push_back("observe.horizon_s: must be > 0");
  if (!(o.sth_s > 0)) problems.push_back("observe.sth_s: must be > 0");
  if (o.max_observations < 0) problems.push_back("observe.max_observations: must be >= 0");
  if (!(o.visibility_step_s > 0)) problems.push_back("observe.visibility_step_s: must be > 0");
  if (!(o.max_off_nadir_deg > 0 && o.max_off_nadir_deg < 90)) problems.push_back("observe.max_off_nadir_deg: must be in (0, 90)");
  if (o.solver == obs::SolverKind::kExact && static_cast<std::size_t>(t.count) > o.exact.max_targets)
    problems.push_back("observe.exact.max_targets: " + std::to_string(o.exact.max_targets) +
                       " is below targets.count " + std::to_string(t.count));
  if (o.ga.population < 2) problems.push_back("observe.ga.population: must be >= 2");
  if (o.ga.generations < 0) problems.push_back("observe.ga.generations: must be >= 0");
  for (double pr : {o.ga.p_crossover, o.ga.p_mutation})
    if (!(pr >= 0 && pr <= 1)) problems.push_back("observe.ga: probabilities must be in [0, 1]");

  const auto& p = s.pipeline;
  if (!(p.t_slot_s > 0)) problems.push_back("pipeline.t_slot_s: must be > 0");
  if (p.replicas < 1) problems.push_back("pipeline.replicas: must be >= 1");
  if (!(p.exec_cv > 0 && p.exec_cv < 1)) problems.push_back("pipeline.exec_cv: must be in (0, 1)");
  if (!p.exec_log_file.empty() && !fs::exists(s.resolve(p.exec_log_file)))
    problems.push_back("pipeline.exec_log_file: file not found: " + s.resolve(p.exec_log_file));

  const auto& e = s.experiments;
  if (e.observe_target_counts.empty()) problems.push_back("experiments.observe_target_counts: empty");
  for (int c : e.observe_target_counts)
    if (c < 1) problems.push_back("experiments.observe_target_counts: counts must be >= 1");
  if (e.observe_instances < 1) problems.push_back("experiments.observe_instances: must be >= 1");
  if (e.ga_seeds < 1) problems.push_back("experiments.ga_seeds: must be >= 1");
  if (e.mc_realizations < 1) problems.push_back("experiments.mc_realizations: must be >= 1");
  if (e.reschedule_targets < 1 || e.reschedule_sth < 1 || e.walker_planes < 1)
    problems.push_back("experiments: reschedule sizes must be >= 1");
  if (e.reschedule_sth_s < 0) problems.push_back("experiments.reschedule_sth_s: must be >= 0");
  if (e.sweep_t_slots.empty()) problems.push_back("experiments.sweep_t_slots: empty");
  for (double ts : e.sweep_t_slots)
    if (!(ts > 0)) problems.push_back("experiments.sweep_t_slots: values must be > 0");
  if (e.sweep_replicas < 1) problems.push_back("experiments.sweep_replicas: must be >= 1");
  if (!(e.capacity_fps_load > 0)) problems.push_back("experiments.capacity_fps_load: must be > 0");
}

// Shortest text that parses back to the same double.
std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& base_dir, const std::string& source_name) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ValidationError({source_name + ":" + std::to_string(e.mark.line + 1) + ":" +
                           std::to_string(e.mark.column + 1) + ": parse error: " + e.msg});
  }
  if (!root || !root.IsMap()) throw ValidationError({source_name + ": top level must be a mapping"});

  Scenario s;
  s.base_dir = base_dir;
  Reader r(source_name);
  r.check_keys(root, "",
               {"name", "seed", "output_dir", "constellation", "agility", "frame", "workload", "platforms", "link",
                "ground_stations", "turbulence", "targets", "observe", "pipeline", "experiments"});
  r.get(root, "name", s.name, "");
  r.get(root, "seed", s.seed, "");
  r.get(root, "output_dir", s.output_dir, "");

  read_constellation(r, root, s.constellation);
  if (auto n = r.section(root, "agility", "",
                         {"roll_max_deg", "pitch_max_deg", "yaw_max_deg", "p_man_w", "e_max_j", "prc_s", "gsd_nadir"})) {
    auto& a = s.agility;
    r.get(n, "roll_max_deg", a.roll_max_deg, "agility");
    r.get(n, "pitch_max_deg", a.pitch_max_deg, "agility");
    r.get(n, "yaw_max_deg", a.yaw_max_deg, "agility");
    r.get(n, "p_man_w", a.p_man_w, "agility");
    r.get(n, "e_max_j", a.e_max_j, "agility");
    r.get(n, "prc_s", a.prc_s, "agility");
    r.get(n, "gsd_nadir", a.gsd_nadir, "agility");
  }
  if (auto n = r.section(root, "frame", "", {"n_img", "img_bits", "ship_bits", "width_px", "height_px"})) {
    r.get(n, "n_img", s.frame.n_img, "frame");
    r.get(n, "img_bits", s.frame.img_bits, "frame");
    r.get(n, "ship_bits", s.frame.ship_bits, "frame");
    r.get(n, "width_px", s.frame.width_px, "frame");
    r.get(n, "height_px", s.frame.height_px, "frame");
  }
  if (auto n = r.section(root, "workload", "", {"work_flops", "rho", "semantic_bits_per_image"})) {
    r.get(n, "work_flops", s.workload.work_flops, "workload");
    r.get(n, "rho", s.workload.rho, "workload");
    r.get(n, "semantic_bits_per_image", s.workload.semantic_bits_per_image, "workload");
  }
  read_platforms(r, root, s);
  if (auto n = r.section(root, "link", "",
                         {"r_isl_bps", "p_isl_w", "bandwidth_hz", "p_dl_w", "g_dl_db", "noise_dbw", "fc_hz",
                          "threshold_mode", "margin_db", "modcod_file"})) {
    auto& l = s.link;
    r.get(n, "r_isl_bps", l.r_isl_bps, "link");
    r.get(n, "p_isl_w", l.p_isl_w, "link");
    r.get(n, "bandwidth_hz", l.bandwidth_hz, "link");
    r.get(n, "p_dl_w", l.p_dl_w, "link");
    r.get(n, "g_dl_db", l.g_dl_db, "link");
    r.get(n, "noise_dbw", l.noise_dbw, "link");
    r.get(n, "fc_hz", l.fc_hz, "link");
    r.get(n, "margin_db", l.margin_db, "link");
    std::string mode = "table";
    r.get(n, "threshold_mode", mode, "link");
    if (mode == "table") l.mode = network::ThresholdMode::kTable;
    else if (mode == "shannon") l.mode = network::ThresholdMode::kShannon;
    else r.problem(n["threshold_mode"], "link.threshold_mode", "expected table or shannon");
    r.get(n, "modcod_file", s.modcod_file, "link");
  }
  if (auto n = r.section(root, "ground_stations", "", {"file", "min_elevation_deg"})) {
    r.get(n, "file", s.stations_file, "ground_stations");
    r.get(n, "min_elevation_deg", s.station_min_elevation_deg, "ground_stations");
  }
  if (auto n = r.section(root, "turbulence", "", {"model", "median", "log_sigma", "threshold", "cdf_file"})) {
    auto& t = s.turbulence;
    std::string model = "lognormal";
    r.get(n, "model", model, "turbulence");
    if (model == "lognormal") t.kind = atmosphere::TurbulenceModel::Kind::kLognormal;
    else if (model == "empirical") t.kind = atmosphere::TurbulenceModel::Kind::kEmpirical;
    else r.problem(n["model"], "turbulence.model", "expected lognormal or empirical");
    r.get(n, "median", t.lognormal.median, "turbulence");
    r.get(n, "log_sigma", t.lognormal.log_sigma, "turbulence");
    r.get(n, "threshold", t.threshold, "turbulence");
    r.get(n, "cdf_file", s.cn2_cdf_file, "turbulence");
  }
  read_targets(r, root, s.targets);
  read_observe(r, root, s.observe);
  read_pipeline(r, root, s.pipeline);
  read_experiments(r, root, s.experiments);

  auto problems = std::move(r.problems);
  // Field-level errors first; cross-checks would only repeat them.
  if (problems.empty()) validate(s, problems);
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError({"cannot open scenario file: " + path});
  std::stringstream ss;
  ss << in.rdbuf();
  auto base = fs::path(path).parent_path().string();
  return parse_scenario(ss.str(), base.empty() ? "." : base, path);
}

std::string save_scenario(const Scenario& s) {
  YAML::Emitter out;
  auto kv = [&](const char* k, const std::string& v) { out << YAML::Key << k << YAML::Value << v; };
  auto kd = [&](const char* k, double v) { out << YAML::Key << k << YAML::Value << num(v); };
  auto ki = [&](const char* k, long long v) { out << YAML::Key << k << YAML::Value << v; };
  auto kb = [&](const char* k, bool v) { out << YAML::Key << k << YAML::Value << v; };

  out << YAML::BeginMap;
  kv("name", s.name);
  out << YAML::Key << "seed" << YAML::Value << s.seed;
  kv("output_dir", s.output_dir);

  const auto& c = s.constellation;
  out << YAML::Key << "constellation" << YAML::Value << YAML::BeginMap;
  ki("n_sats_edge", c.n_sats_edge);
  kd("altitude_km", c.altitude_e_km);
  kd("inclination_deg", c.inclination_e_deg);
  ki("n_planes", c.n_planes);
  kd("raan_deg", c.raan_e_deg);
  kd("phase_offset_deg", c.phase_offset_e_deg);
  kb("cohosted_observer", c.cohosted_observer);
  if (!c.obs_sats.empty()) {
    out << YAML::Key << "obs_sats" << YAML::Value << YAML::BeginSeq;
    for (const auto& el : c.obs_sats) {
      out << YAML::Flow << YAML::BeginMap;
      kd("altitude_km", el.altitude_km);
      kd("inclination_deg", el.inclination_deg);
      kd("raan_deg", el.raan_deg);
      kd("phase_deg", el.phase_deg);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;

  const auto& a = s.agility;
  out << YAML::Key << "agility" << YAML::Value << YAML::BeginMap;
  kd("roll_max_deg", a.roll_max_deg);
  kd("pitch_max_deg", a.pitch_max_deg);
  kd("yaw_max_deg", a.yaw_max_deg);
  kd("p_man_w", a.p_man_w);
  kd("e_max_j", a.e_max_j);
  kd("prc_s", a.prc_s);
  kd("gsd_nadir", a.gsd_nadir);
  out << YAML::EndMap;

  out << YAML::Key << "frame" << YAML::Value << YAML::BeginMap;
  ki("n_img", s.frame.n_img);
  kd("img_bits", s.frame.img_bits);
  kd("ship_bits", s.frame.ship_bits);
  ki("width_px", s.frame.width_px);
  ki("height_px", s.frame.height_px);
  out << YAML::EndMap;

  out << YAML::Key << "workload" << YAML::Value << YAML::BeginMap;
  kd("work_flops", s.workload.work_flops);
  kd("rho", s.workload.rho);
  kd("semantic_bits_per_image", s.workload.semantic_bits_per_image);
  out << YAML::EndMap;

  out << YAML::Key << "platforms" << YAML::Value << YAML::BeginMap;
  kv("edge", s.edge_platform);
  kv("ground", s.ground_platform);
  kb("use_ground", s.use_ground);
  if (!s.custom_platforms.empty()) {
    out << YAML::Key << "custom" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : s.custom_platforms) {
      out << YAML::BeginMap;
      kv("id", p.id);
      ki("n_cores", p.n_cores);
      kd("f_max_hz", p.f_max_hz);
      kd("p_max_w", p.p_max_w);
      kd("flops_per_cycle", p.flops_per_cycle);
      kd("mu_c", p.mu_c);
      kd("mu_sync_s", p.mu_sync_s);
      kv("kind", kind_name(p.kind));
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;

  const auto& l = s.link;
  out << YAML::Key << "link" << YAML::Value << YAML::BeginMap;
  kd("r_isl_bps", l.r_isl_bps);
  kd("p_isl_w", l.p_isl_w);
  kd("bandwidth_hz", l.bandwidth_hz);
  kd("p_dl_w", l.p_dl_w);
  kd("g_dl_db", l.g_dl_db);
  kd("noise_dbw", l.noise_dbw);
  kd("fc_hz", l.fc_hz);
  kv("threshold_mode", l.mode == network::ThresholdMode::kTable ? "table" : "shannon");
  kd("margin_db", l.margin_db);
  if (!s.modcod_file.empty()) kv("modcod_file", s.modcod_file);
  out << YAML::EndMap;

  out << YAML::Key << "ground_stations" << YAML::Value << YAML::BeginMap;
  kv("file", s.stations_file);
  kd("min_elevation_deg", s.station_min_elevation_deg);
  out << YAML::EndMap;

  const auto& t = s.turbulence;
  out << YAML::Key << "turbulence" << YAML::Value << YAML::BeginMap;
  kv("model", t.kind == atmosphere::TurbulenceModel::Kind::kLognormal ? "lognormal" : "empirical");
  kd("median", t.lognormal.median);
  kd("log_sigma", t.lognormal.log_sigma);
  kd("threshold", t.threshold);
  if (!s.cn2_cdf_file.empty()) kv("cdf_file", s.cn2_cdf_file);
  out << YAML::EndMap;

  const auto& tg = s.targets;
  out << YAML::Key << "targets" << YAML::Value << YAML::BeginMap;
  kv("mode", mode_name(tg.mode));
  ki("count", tg.count);
  kd("track_begin_s", tg.track_begin_s);
  kd("track_end_s", tg.track_end_s);
  kd("max_offset_km", tg.max_offset_km);
  kd("lat_min", tg.lat_min);
  kd("lat_max", tg.lat_max);
  kd("lon_min", tg.lon_min);
  kd("lon_max", tg.lon_max);
  if (!tg.list.empty()) {
    out << YAML::Key << "list" << YAML::Value << YAML::BeginSeq;
    for (const auto& x : tg.list) {
      out << YAML::Flow << YAML::BeginMap;
      ki("id", x.id);
      kd("lat_deg", x.lat_deg);
      kd("lon_deg", x.lon_deg);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;

  const auto& o = s.observe;
  out << YAML::Key << "observe" << YAML::Value << YAML::BeginMap;
  kd("horizon_s", o.horizon_s);
  kd("sth_s", o.sth_s);
  ki("max_observations", o.max_observations);
  kv("solver", obs::to_string(o.solver));
  kd("visibility_step_s", o.visibility_step_s);
  kd("max_off_nadir_deg", o.max_off_nadir_deg);
  out << YAML::Key << "exact" << YAML::Value << YAML::BeginMap;
  ki("max_targets", static_cast<long long>(o.exact.max_targets));
  ki("max_otws", static_cast<long long>(o.exact.max_otws));
  ki("max_labels", static_cast<long long>(o.exact.max_labels));
  ki("max_nodes", static_cast<long long>(o.exact.max_nodes));
  out << YAML::EndMap;
  out << YAML::Key << "ga" << YAML::Value << YAML::BeginMap;
  ki("population", o.ga.population);
  ki("generations", o.ga.generations);
  kd("p_crossover", o.ga.p_crossover);
  kd("p_mutation", o.ga.p_mutation);
  out << YAML::EndMap;
  out << YAML::EndMap;

  const auto& p = s.pipeline;
  out << YAML::Key << "pipeline" << YAML::Value << YAML::BeginMap;
  kd("t_slot_s", p.t_slot_s);
  ki("replicas", p.replicas);
  kb("turbulence_gate", p.turbulence_gate);
  kv("downlink_convention", p.convention == proc::DownlinkConvention::kSplit ? "split" : "shared");
  if (!p.exec_log_file.empty()) kv("exec_log_file", p.exec_log_file);
  kd("exec_cv", p.exec_cv);
  out << YAML::EndMap;

  const auto& e = s.experiments;
  out << YAML::Key << "experiments" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "observe_target_counts" << YAML::Value << YAML::Flow << e.observe_target_counts;
  ki("observe_instances", e.observe_instances);
  ki("ga_seeds", e.ga_seeds);
  kd("observe_box_lat_deg", e.observe_box_lat_deg);
  kd("observe_box_lon_deg", e.observe_box_lon_deg);
  kd("observe_horizon_s", e.observe_horizon_s);
  ki("mc_realizations", e.mc_realizations);
  ki("reschedule_targets", e.reschedule_targets);
  ki("reschedule_sth", e.reschedule_sth);
  kd("reschedule_sth_s", e.reschedule_sth_s);
  ki("walker_planes", e.walker_planes);
  kd("reschedule_box_lat_deg", e.reschedule_box_lat_deg);
  kd("reschedule_box_lon_deg", e.reschedule_box_lon_deg);
  kd("reschedule_center_lat", e.reschedule_center_lat);
  kd("reschedule_center_lon", e.reschedule_center_lon);
  out << YAML::Key << "sweep_t_slots" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double v : e.sweep_t_slots) out << num(v);
  out << YAML::EndSeq;
  out << YAML::Key << "sweep_platforms" << YAML::Value << YAML::Flow << e.sweep_platforms;
  ki("sweep_replicas", e.sweep_replicas);
  kd("capacity_fps_load", e.capacity_fps_load);
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace orbitedge::scenario
