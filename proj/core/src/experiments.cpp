#include "orbitedge/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "orbitedge/errors.hpp"
#include "orbitedge/rng.hpp"

namespace orbitedge::experiments {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

geometry::Target target_at(int id, const Vec3& p) {
  const auto [lat, lon] = geometry::subpoint(p);
  return {id, lat, lon};
}

double max_off_nadir(const scenario::Scenario& s) {
  return std::min(s.observe.max_off_nadir_deg, s.agility.max_off_nadir_deg());
}

std::uint64_t ga_seed(const scenario::Scenario& s, std::uint64_t k) {
  return derive_seed(s.seed, static_cast<std::uint64_t>(Stream::kGenetic), k);
}

}  // namespace

Experiment parse_experiment(const std::string& name) {
  if (name == "validate") return Experiment::kValidate;
  if (name == "observe") return Experiment::kObserve;
  if (name == "turbulence-mc") return Experiment::kTurbulenceMc;
  if (name == "capacity") return Experiment::kCapacity;
  if (name == "pipeline") return Experiment::kPipeline;
  if (name == "sweep") return Experiment::kSweep;
  throw ConfigError("unknown experiment '" + name + "'");
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::kValidate: return "validate";
    case Experiment::kObserve: return "observe";
    case Experiment::kTurbulenceMc: return "turbulence-mc";
    case Experiment::kCapacity: return "capacity";
    case Experiment::kPipeline: return "pipeline";
    case Experiment::kSweep: return "sweep";
  }
  return "?";
}

std::vector<geometry::Target> track_targets(const geometry::ConstellationSpec& cs, int count, double t_begin,
                                            double t_end, double max_offset_km, std::uint64_t seed) {
  const auto el = geometry::observer_elements(cs).at(0);
  const double R = cs.earth_radius_km;
  Rng rng(seed);
  std::vector<geometry::Target> out;
  for (int i = 0; i < count; ++i) {
    const double t = t_begin + (t_end - t_begin) * uniform01(rng);
    const double off = max_offset_km * (2.0 * uniform01(rng) - 1.0);
    const Vec3 p = geometry::position_ecef(el, t, R);
    const Vec3 ahead = geometry::position_ecef(el, t + 1.0, R);
    const Vec3 up = p / p.norm();
    const Vec3 cross = up.cross(ahead - p);
    const Vec3 side = cross / cross.norm();
    // Move along the surface by `off` km in the cross-track direction.
    const double ang = off / R;
    out.push_back(target_at(i, up * std::cos(ang) + side * std::sin(ang)));
  }
  return out;
}

std::vector<geometry::Target> box_targets(int count, double lat_min, double lat_max, double lon_min, double lon_max,
                                          std::uint64_t seed) {
  Rng rng(seed);
  std::vector<geometry::Target> out;
  // Uniform over the sphere patch: sample sin(lat) uniformly.
  const double s0 = std::sin(deg2rad(lat_min)), s1 = std::sin(deg2rad(lat_max));
  for (int i = 0; i < count; ++i) {
    const double lat = rad2deg(std::asin(s0 + (s1 - s0) * uniform01(rng)));
    double lon = lon_min + (lon_max - lon_min) * uniform01(rng);
    if (lon > 180.0) lon -= 360.0;
    if (lon < -180.0) lon += 360.0;
    out.push_back({i, lat, lon});
  }
  return out;
}

std::vector<geometry::Target> generate_targets(const scenario::Scenario& s) {
  const auto& t = s.targets;
  const auto seed = derive_seed(s.seed, static_cast<std::uint64_t>(Stream::kTargets), 0);
  switch (t.mode) {
    case scenario::TargetSpec::Mode::kList: return t.list;
    case scenario::TargetSpec::Mode::kBox: return box_targets(t.count, t.lat_min, t.lat_max, t.lon_min, t.lon_max, seed);
    case scenario::TargetSpec::Mode::kTrack:
      return track_targets(s.constellation, t.count, t.track_begin_s, t.track_end_s, t.max_offset_km, seed);
  }
  return {};
}

obs::SchedulingInstance make_instance(const geometry::ConstellationSpec& cs, const std::vector<geometry::Target>& targets,
                                      const acquisition::AgilitySpec& agility, double t_begin, double t_end,
                                      double max_off_nadir_deg, double step_s) {
  geometry::VisibilityOptions vo;
  vo.step_s = step_s;
  const auto windows = geometry::compute_visibility_windows(cs, targets, t_begin, t_end, max_off_nadir_deg, vo);
  obs::SchedulingInstance inst;
  inst.otws = acquisition::build_otws(cs, targets, windows, agility);
  inst.agility = agility;
  inst.sth_start = t_begin;
  inst.sth_end = t_end;
  const auto n_obs = geometry::observer_elements(cs).size();
  for (std::size_t i = 0; i < n_obs; ++i) inst.satellites.push_back(static_cast<int>(i));
  inst.normalize();
  return inst;
}

obs::SchedulingInstance observe_instance(const scenario::Scenario& s, int n_targets, int index) {
  const auto& e = s.experiments;
  const auto& cs = s.constellation;
  const auto el = geometry::observer_elements(cs).at(0);
  const auto [clat, clon] = geometry::subpoint(geometry::position_ecef(el, 0.5 * e.observe_horizon_s, cs.earth_radius_km));
  const auto seed = derive_seed(s.seed, static_cast<std::uint64_t>(Stream::kInstances),
                                static_cast<std::uint64_t>(n_targets) * 1000 + static_cast<std::uint64_t>(index));
  const double hl = 0.5 * e.observe_box_lat_deg, hw = 0.5 * e.observe_box_lon_deg;
  const auto targets = box_targets(n_targets, std::max(clat - hl, -89.0), std::min(clat + hl, 89.0), clon - hw,
                                   clon + hw, seed);
  return make_instance(cs, targets, s.agility, 0.0, e.observe_horizon_s, max_off_nadir(s), s.observe.visibility_step_s);
}

std::vector<obs::ScheduledObservation> episode_observations(const scenario::Scenario& s) {
  const auto& o = s.observe;
  auto targets = generate_targets(s);
  std::vector<obs::ScheduledObservation> out;
  std::set<int> done;
  int k = 0;
  for (double t0 = 0.0; t0 < o.horizon_s; t0 += o.sth_s, ++k) {
    std::vector<geometry::Target> remaining;
    for (const auto& t : targets)
      if (!done.count(t.id)) remaining.push_back(t);
    if (remaining.empty()) break;
    const double t1 = std::min(t0 + o.sth_s, o.horizon_s);
    const auto inst = make_instance(s.constellation, remaining, s.agility, t0, t1, max_off_nadir(s), o.visibility_step_s);
    auto ga = o.ga;
    ga.seed = ga_seed(s, static_cast<std::uint64_t>(k));
    const auto sched = obs::solve(inst, o.solver, ga, o.exact);
    for (const auto& seq : sched.sequences)
      for (const auto& item : seq.items) {
        out.push_back(item);
        done.insert(item.otw.target_id);
      }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.otw.timestamp < b.otw.timestamp;
  });
  if (o.max_observations >= 0 && out.size() > static_cast<std::size_t>(o.max_observations))
    out.resize(static_cast<std::size_t>(o.max_observations));
  return out;
}

pipeline::EpisodeConfig episode_config(const scenario::Scenario& s) {
  pipeline::EpisodeConfig c;
  c.constellation = s.constellation;
  c.stations = s.stations;
  c.link = s.link;
  c.edge_platform = s.platform(s.edge_platform);
  c.ground_platform = s.platform(s.ground_platform);
  c.use_ground = s.use_ground;
  c.workload = s.workload;
  c.frame = s.frame;
  c.turbulence = s.turbulence;
  c.turbulence_gate = s.pipeline.turbulence_gate;
  c.t_slot = s.pipeline.t_slot_s;
  c.duration_s = s.observe.horizon_s;
  c.convention = s.pipeline.convention;
  c.replicas = s.pipeline.replicas;
  c.seed = s.seed;
  c.exec_log.cv_at_fmax = s.pipeline.exec_cv;
  if (!s.pipeline.exec_log_file.empty()) c.exec_log_csv = s.resolve(s.pipeline.exec_log_file);
  return c;
}

RescheduleSetup reschedule_setup(const scenario::Scenario& s) {
  const auto& e = s.experiments;
  RescheduleSetup r;
  r.constellation = s.constellation;
  auto& cs = r.constellation;
  cs.cohosted_observer = false;
  cs.obs_sats.clear();
  // One observer per plane, planes spread over 180 deg and phased so the
  // passes over the target area interleave.
  for (int p = 0; p < e.walker_planes; ++p) {
    geometry::OrbitalElements el;
    el.altitude_km = s.constellation.altitude_e_km;
    el.inclination_deg = s.constellation.inclination_e_deg;
    el.raan_deg = 180.0 * p / e.walker_planes;
    el.phase_deg = 360.0 * p / e.walker_planes;
    cs.obs_sats.push_back(el);
  }
  const double hl = 0.5 * e.reschedule_box_lat_deg, hw = 0.5 * e.reschedule_box_lon_deg;
  r.targets = box_targets(e.reschedule_targets, e.reschedule_center_lat - hl, e.reschedule_center_lat + hl,
                          e.reschedule_center_lon - hw, e.reschedule_center_lon + hw,
                          derive_seed(s.seed, static_cast<std::uint64_t>(Stream::kTargets), 1));
  for (const auto& t : r.targets) r.target_ids.push_back(t.id);
  const double sth = e.reschedule_sth_s > 0.0 ? e.reschedule_sth_s : geometry::orbital_period(cs.altitude_e_km);
  for (int k = 0; k < e.reschedule_sth; ++k)
    r.instances.push_back(make_instance(cs, r.targets, s.agility, k * sth, (k + 1) * sth,
                                        max_off_nadir(s), s.observe.visibility_step_s));
  return r;
}

scenario::Scenario apply_overrides(scenario::Scenario s, const Overrides& o) {
  if (o.seed) s.seed = *o.seed;
  if (o.out_dir) s.output_dir = *o.out_dir;
  if (o.solver) s.observe.solver = *o.solver;
  if (o.replicas) {
    if (*o.replicas < 1) throw ValidationError({"--replicas: must be >= 1"});
    s.pipeline.replicas = *o.replicas;
  }
  return s;
}

namespace {

Artifacts run_validate(const scenario::Scenario& s) {
  Artifacts a;
  a.summary["name"] = s.name;
  a.summary["seed"] = s.seed;
  a.summary["edge_sats"] = s.constellation.n_sats_edge;
  a.summary["stations"] = s.stations.stations.size();
  a.summary["modcods"] = s.link.modcods.size();
  a.summary["edge_platform"] = s.platform(s.edge_platform).id;
  a.summary["targets"] = s.targets.mode == scenario::TargetSpec::Mode::kList ? s.targets.list.size()
                                                                             : static_cast<std::size_t>(s.targets.count);
  a.files.emplace_back("scenario.yaml", scenario::save_scenario(s));
  return a;
}

Artifacts run_observe(const scenario::Scenario& s) {
  const auto& e = s.experiments;
  Artifacts a;
  std::ostringstream rows;
  rows << "targets,instance,solver,ga_seed,profit,observed,maneuver_energy_j,fell_back\n";
  nlohmann::json per_count = nlohmann::json::array();
  for (int n : e.observe_target_counts) {
    std::vector<double> pe, pg, pf;
    int fallbacks = 0;
    for (int i = 0; i < e.observe_instances; ++i) {
      const auto inst = observe_instance(s, n, i);
      bool fell = false;
      const auto ex = obs::solve(inst, obs::SolverKind::kExact, s.observe.ga, s.observe.exact, &fell);
      fallbacks += fell ? 1 : 0;
      rows << n << ',' << i << ",exact,," << fmt(ex.total_profit) << ',' << ex.size() << ','
           << fmt(ex.maneuver_energy_j) << ',' << (fell ? 1 : 0) << '\n';
      pe.push_back(ex.total_profit);
      std::vector<double> gp;
      for (int g = 0; g < e.ga_seeds; ++g) {
        auto opt = s.observe.ga;
        opt.seed = ga_seed(s, static_cast<std::uint64_t>(g));
        const auto ga = obs::solve_ga(inst, opt);
        rows << n << ',' << i << ",ga," << g << ',' << fmt(ga.total_profit) << ',' << ga.size() << ','
             << fmt(ga.maneuver_energy_j) << ",0\n";
        gp.push_back(ga.total_profit);
      }
      pg.push_back(mean(gp));
      const auto ff = obs::solve_fifo(inst);
      rows << n << ',' << i << ",fifo,," << fmt(ff.total_profit) << ',' << ff.size() << ','
           << fmt(ff.maneuver_energy_j) << ",0\n";
      pf.push_back(ff.total_profit);
    }
    nlohmann::json c;
    c["targets"] = n;
    c["exact_mean_profit"] = mean(pe);
    c["ga_mean_profit"] = mean(pg);
    c["fifo_mean_profit"] = mean(pf);
    c["exact_over_fifo"] = mean(pf) > 0 ? mean(pe) / mean(pf) - 1.0 : 0.0;
    c["exact_over_ga"] = mean(pg) > 0 ? mean(pe) / mean(pg) - 1.0 : 0.0;
    c["exact_fallbacks"] = fallbacks;
    if (!(mean(pe) + 1e-9 >= mean(pg) && mean(pg) + 1e-9 >= mean(pf))) a.ok = false;
    per_count.push_back(c);
  }
  a.summary["counts"] = per_count;
  a.files.emplace_back("observe.csv", rows.str());
  return a;
}

Artifacts run_turbulence(const scenario::Scenario& s) {
  const auto& e = s.experiments;
  Artifacts a;
  const auto& model = s.turbulence;
  const auto acq = episode_observations(s);
  const int M = e.mc_realizations;

  std::vector<int> accepted(acq.size(), 0);
  std::ostringstream real;
  real << "realization,expected_profit,actual_profit,accepted\n";
  double expected = 0.0;
  for (const auto& x : acq) expected += x.otw.profit;
  for (int m = 0; m < M; ++m) {
    atmosphere::Cn2Sampler sampler(model, derive_seed(s.seed, static_cast<std::uint64_t>(Stream::kTurbulence),
                                                      static_cast<std::uint64_t>(m)));
    double actual = 0.0;
    int acc = 0;
    for (std::size_t i = 0; i < acq.size(); ++i)
      if (atmosphere::gate_observation(model, sampler.draw())) {
        ++accepted[i];
        ++acc;
        actual += acq[i].otw.profit;
      }
    real << m << ',' << fmt(expected) << ',' << fmt(actual) << ',' << acc << '\n';
  }

  const double p = model.cdf(model.threshold);
  std::ostringstream per;
  per << "index,otw,target,timestamp,profit,precision,expected_precision,ci99_lo,ci99_hi,mean_actual_profit\n";
  const double half = 2.5758293035489 * std::sqrt(p * (1 - p) / M);
  std::size_t total_acc = 0;
  for (std::size_t i = 0; i < acq.size(); ++i) {
    const double prec = static_cast<double>(accepted[i]) / M;
    total_acc += static_cast<std::size_t>(accepted[i]);
    per << i << ',' << acq[i].otw.id << ',' << acq[i].otw.target_id << ',' << fmt(acq[i].otw.timestamp) << ','
        << fmt(acq[i].otw.profit) << ',' << fmt(prec) << ',' << fmt(p) << ',' << fmt(p - half) << ',' << fmt(p + half)
        << ',' << fmt(prec * acq[i].otw.profit) << '\n';
  }
  const double n_all = static_cast<double>(acq.size()) * M;
  const double pooled = n_all > 0 ? total_acc / n_all : 0.0;
  const double pooled_half = 2.5758293035489 * std::sqrt(p * (1 - p) / std::max(n_all, 1.0));
  a.summary["acquisitions"] = acq.size();
  a.summary["realizations"] = M;
  a.summary["threshold"] = model.threshold;
  a.summary["cdf_at_threshold"] = p;
  a.summary["precision"] = pooled;
  a.summary["ci99"] = {p - pooled_half, p + pooled_half};
  a.summary["precision_within_ci"] = std::abs(pooled - p) <= pooled_half;
  a.summary["expected_profit"] = expected;
  double mean_actual = 0.0;
  for (std::size_t i = 0; i < acq.size(); ++i) mean_actual += acq[i].otw.profit * accepted[i] / static_cast<double>(M);
  a.summary["mean_actual_profit"] = mean_actual;

  // Rescheduling across consecutive horizons.
  const auto setup = reschedule_setup(s);
  obs::RescheduleOptions ro;
  ro.solver = s.observe.solver;
  ro.exact = s.observe.exact;
  ro.ga = s.observe.ga;
  ro.ga.seed = ga_seed(s, 1'000'000);
  atmosphere::Cn2Sampler sampler(model, derive_seed(s.seed, static_cast<std::uint64_t>(Stream::kTurbulence), 1'000'000));
  const auto rr = obs::reschedule_across_sth(setup.instances, setup.target_ids, sampler, ro);
  std::ostringstream sth;
  sth << "sth,scheduled,accepted,expected_profit,actual_profit,fell_back\n";
  for (const auto& st : rr.steps) {
    int acc = 0;
    for (char c : st.accepted) acc += c;
    sth << st.sth << ',' << st.schedule.size() << ',' << acc << ',' << fmt(st.expected_profit) << ','
        << fmt(st.actual_profit) << ',' << (st.fell_back_to_ga ? 1 : 0) << '\n';
  }
  std::ostringstream tg;
  tg << "target,attempts,acquired,acquired_in_sth\n";
  for (const auto& t : rr.targets)
    tg << t.target_id << ',' << t.attempts << ',' << (t.acquired ? 1 : 0) << ',' << t.acquired_in_sth << '\n';
  nlohmann::json rj;
  rj["targets"] = rr.targets.size();
  rj["sth"] = rr.steps.size();
  rj["attempts_per_target"] = rr.attempts_per_target;
  rj["rescheduled_fraction"] = rr.rescheduled_fraction;
  rj["success_fraction"] = rr.success_fraction;
  rj["total_actual_profit"] = rr.total_actual_profit;
  a.summary["reschedule"] = rj;

  a.files.emplace_back("turbulence_acquisitions.csv", per.str());
  a.files.emplace_back("turbulence_realizations.csv", real.str());
  a.files.emplace_back("reschedule_sth.csv", sth.str());
  a.files.emplace_back("reschedule_targets.csv", tg.str());
  return a;
}

Artifacts run_capacity(const scenario::Scenario& s) {
  Artifacts a;
  const double T = s.pipeline.t_slot_s;
  const double load = s.experiments.capacity_fps_load;
  const auto ground = s.platform(s.ground_platform);
  const int N = s.constellation.n_sats_edge;
  std::ostringstream os;
  os << "config,edge_platform,edge_nodes,ground,images_per_slot,fps,load_fps,processing_power_w\n";
  nlohmann::json rows = nlohmann::json::array();

  auto emit = [&](const std::string& config, const std::string& edge, int nodes, bool with_ground,
                  const proc::LoadCapacity& cap, double power) {
    os << config << ',' << edge << ',' << nodes << ',' << (with_ground ? 1 : 0) << ',' << fmt(cap.images_per_slot)
       << ',' << fmt(cap.fps) << ',' << fmt(load) << ',' << fmt(power) << '\n';
    rows.push_back({{"config", config}, {"edge_platform", edge}, {"fps", cap.fps}, {"processing_power_w", power}});
  };

  // Processing power at the reference load spread evenly over the processors;
  // NaN when the load does not fit.
  auto power_at_load = [&](const std::vector<compute::PlatformSpec>& ps) {
    const double per = load * T / ps.size();
    double w = 0.0;
    for (const auto& p : ps) {
      try {
        w += compute::power_at(p, compute::optimal_frequency(p, s.workload, per, T));
      } catch (const InfeasibleLoadError&) {
        return std::nan("");
      }
    }
    return w;
  };

  {
    const std::vector<compute::PlatformSpec> ps{ground};
    emit("ground_only", "", 0, true, proc::max_supported_load(ps, s.workload, T), power_at_load(ps));
  }
  for (const auto& name : s.experiments.sweep_platforms) {
    const auto edge = s.platform(name);
    std::vector<compute::PlatformSpec> ps(static_cast<std::size_t>(N), edge);
    const double pw = power_at_load(ps);
    if (s.use_ground) ps.push_back(ground);
    emit("edge_plus_ground", edge.id, N, s.use_ground, proc::max_supported_load(ps, s.workload, T), pw);
  }
  std::ostringstream single;
  single << "platform,max_fps\n";
  for (const auto& p : {compute::cloud_cpu(), compute::satellite_cpu(), compute::jetson_nano(), compute::jetson_agx()})
    single << p.id << ',' << fmt(p.max_fps(s.workload.work_flops)) << '\n';
  a.summary["rows"] = rows;
  a.files.emplace_back("capacity.csv", os.str());
  a.files.emplace_back("platform_fps.csv", single.str());
  return a;
}

Artifacts run_pipeline(const scenario::Scenario& s) {
  Artifacts a;
  const auto cfg = episode_config(s);
  const auto acq = episode_observations(s);
  const auto r = pipeline::run(cfg, acq);
  a.summary = pipeline::summary_json(cfg, r);
  std::vector<double> t, en;
  double worst_dev = 0.0;
  for (const auto& o : r.observations) {
    if (o.accepted == 0) continue;
    t.push_back(o.otw.timestamp);
    en.push_back(o.energy_mean);
    if (o.energy_mean > 0)
      worst_dev = std::max({worst_dev, (o.energy_mean - o.energy_q05) / o.energy_mean,
                            (o.energy_q95 - o.energy_mean) / o.energy_mean});
  }
  a.summary["energy_trend_j_per_s"] = slope(t, en);
  a.summary["max_quantile_deviation"] = worst_dev;
  a.summary["mean_observation_energy_j"] = mean(en);
  a.ok = r.all_feasible;
  a.files.emplace_back("pipeline_observations.csv", pipeline::observations_csv(r));
  a.files.emplace_back("pipeline_slots.csv", pipeline::slots_csv(r));
  std::ostringstream sched;
  sched << "index,otw,sat,target,timestamp,profit,transition_s,maneuver_energy_j\n";
  for (std::size_t i = 0; i < acq.size(); ++i)
    sched << i << ',' << acq[i].otw.id << ',' << acq[i].otw.sat_id << ',' << acq[i].otw.target_id << ','
          << fmt(acq[i].otw.timestamp) << ',' << fmt(acq[i].otw.profit) << ',' << fmt(acq[i].transition_s) << ','
          << fmt(acq[i].maneuver_energy_j) << '\n';
  a.files.emplace_back("pipeline_schedule.csv", sched.str());
  return a;
}

Artifacts run_sweep(const scenario::Scenario& s) {
  Artifacts a;
  auto cfg = episode_config(s);
  cfg.replicas = s.experiments.sweep_replicas;
  const auto acq = episode_observations(s);
  std::vector<compute::PlatformSpec> ps;
  for (const auto& n : s.experiments.sweep_platforms) ps.push_back(s.platform(n));
  const auto pts = pipeline::sweep(cfg, acq, ps, s.experiments.sweep_t_slots);
  nlohmann::json j = nlohmann::json::array();
  for (const auto& p : pts)
    j.push_back({{"platform", p.platform}, {"t_slot_s", p.t_slot}, {"mean_power_w", p.mean_power_w},
                 {"feasible", p.feasible}});
  a.summary["points"] = j;
  a.files.emplace_back("sweep.csv", pipeline::sweep_csv(pts));
  return a;
}

}  // namespace

Artifacts run_experiment(const scenario::Scenario& s, Experiment e) {
  Artifacts a;
  switch (e) {
    case Experiment::kValidate: a = run_validate(s); break;
    case Experiment::kObserve: a = run_observe(s); break;
    case Experiment::kTurbulenceMc: a = run_turbulence(s); break;
    case Experiment::kCapacity: a = run_capacity(s); break;
    case Experiment::kPipeline: a = run_pipeline(s); break;
    case Experiment::kSweep: a = run_sweep(s); break;
  }
  a.summary["experiment"] = to_string(e);
  a.summary["seed"] = s.seed;
  a.files.emplace_back(to_string(e) + "_summary.json", a.summary.dump(2) + "\n");
  return a;
}

std::vector<std::string> write_artifacts(const Artifacts& a, const std::string& dir) {
  fs::create_directories(dir);
  std::vector<std::string> paths;
  for (const auto& [name, contents] : a.files) {
    const auto path = (fs::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << contents;
    paths.push_back(path);
  }
  return paths;
}

}  // namespace orbitedge::experiments
