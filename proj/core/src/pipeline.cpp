#include "orbitedge/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "orbitedge/constants.hpp"
#include "orbitedge/errors.hpp"

namespace orbitedge::pipeline {

namespace {

// Neumaier summation so replica means do not depend on summation order
// beyond the last few ulps.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) c_ += (sum_ - t) + v;
    else c_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

std::vector<int> apportion(const std::vector<double>& x, int total) {
  std::vector<int> n(x.size(), 0);
  std::vector<std::pair<double, std::size_t>> rem;
  int used = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double share = x[i] * total;
    n[i] = static_cast<int>(std::floor(share + 1e-9));
    used += n[i];
    rem.emplace_back(share - n[i], i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; used < total && k < rem.size(); ++k, ++used) ++n[rem[k].second];
  return n;
}

struct PreparedObservation {
  bool feasible = false;
  std::string failure;
  proc::ProcessingInstance inst;
  std::vector<double> x_int;
  std::vector<int> images;
  std::vector<double> f;
  std::vector<compute::GammaParams> per_image;
  proc::EnergyBreakdown comm;  // processing fields unused
  double planned = 0.0;
};

}  // namespace

const char* category_name(int c) {
  static const char* names[] = {"maneuver",          "scatter_isl", "scatter_dl", "processing_edge",
                                "processing_ground", "gather_isl",  "gather_dl"};
  return c >= 0 && c < kCategoryCount ? names[c] : "?";
}

double EnergyLedger::total() const {
  double s = 0.0;
  for (double j : joules) s += j;
  return s;
}

double EnergyLedger::total_without_maneuver() const { return total() - joules[kManeuver]; }

EnergyLedger& EnergyLedger::operator+=(const EnergyLedger& o) {
  for (int c = 0; c < kCategoryCount; ++c) joules[c] += o.joules[c];
  return *this;
}

GsSelection select_gs(const geometry::ConstellationSpec& spec, const geometry::GroundStationSet& gs,
                      const network::LinkSpec& link, double t) {
  GsSelection best;
  for (const auto& c : geometry::all_contacts(spec, gs, t)) {
    GsSelection s;
    s.station_id = c.station_id;
    s.sat = c.sat_id;
    s.slant_m = c.slant_km * 1e3;
    s.elevation_deg = c.elevation_deg;
    s.snr = network::downlink_snr(link, s.slant_m);
    s.rate_bps = network::downlink_rate(link, s.snr);
    if (s.rate_bps <= 0.0) continue;
    const bool better =
        best.station_id < 0 || s.rate_bps > best.rate_bps ||
        (s.rate_bps == best.rate_bps &&
         (s.snr > best.snr ||
          (s.snr == best.snr && (s.station_id < best.station_id ||
                                 (s.station_id == best.station_id && s.sat < best.sat)))));
    if (better) best = s;
  }
  return best;
}

void EpisodeConfig::validate() const {
  std::vector<std::string> problems;
  auto collect = [&](auto&& fn) {
    try {
      fn();
    } catch (const ValidationError& e) {
      problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    } catch (const Error& e) {
      problems.push_back(e.what());
    }
  };
  collect([&] { constellation.validate(); });
  collect([&] { stations.validate(); });
  collect([&] { edge_platform.validate(); });
  collect([&] { ground_platform.validate(); });
  collect([&] { workload.validate(); });
  collect([&] { frame.validate(); });
  collect([&] { turbulence.validate(); });
  if (!(t_slot > 0)) problems.push_back("slot duration must be positive");
  if (!(duration_s > 0)) problems.push_back("episode duration must be positive");
  if (replicas < 1) problems.push_back("replicas must be >= 1");
  if (!use_edge && !use_ground) problems.push_back("no processors enabled");
  if (!problems.empty()) throw ValidationError(problems);
}

RunResult run(const EpisodeConfig& cfg, const std::vector<obs::ScheduledObservation>& observations) {
  cfg.validate();
  const auto& cs = cfg.constellation;
  const int N = cs.n_sats_edge;
  const double d_isl = N >= 2 ? geometry::isl_slant_range(N, cs.altitude_e_km, cs.earth_radius_km) * 1e3 : 0.0;

  compute::ExecTimeModel edge_model =
      cfg.exec_log_csv.empty()
          ? compute::default_exec_model(cfg.edge_platform, cfg.workload, cfg.seed, cfg.exec_log)
          : compute::fit_exec_model(compute::load_exec_log_csv(cfg.exec_log_csv));
  const compute::ExecTimeModel ground_model =
      compute::default_exec_model(cfg.ground_platform, cfg.workload, cfg.seed, cfg.exec_log);

  RunResult res;
  res.duration_s = cfg.duration_s;

  // Slot occupancy for overlap counts.
  std::map<int, std::vector<int>> by_slot;
  for (std::size_t i = 0; i < observations.size(); ++i)
    by_slot[static_cast<int>(std::floor(observations[i].otw.timestamp / cfg.t_slot))].push_back(static_cast<int>(i));

  std::map<int, GsSelection> gs_cache;
  auto gs_at_slot = [&](int k) -> const GsSelection& {
    auto it = gs_cache.find(k);
    if (it != gs_cache.end()) return it->second;
    return gs_cache[k] = select_gs(cs, cfg.stations, cfg.link, (k + 0.5) * cfg.t_slot);
  };

  // Deterministic part: topology snapshot and allocation per observation.
  std::vector<PreparedObservation> prep(observations.size());
  res.observations.resize(observations.size());
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const auto& so = observations[i];
    auto& rec = res.observations[i];
    auto& pr = prep[i];
    rec.index = static_cast<int>(i);
    rec.otw = so.otw;
    rec.slot = static_cast<int>(std::floor(so.otw.timestamp / cfg.t_slot));
    rec.overlap = static_cast<int>(by_slot[rec.slot].size()) - 1;
    rec.gs_scatter = gs_at_slot(rec.slot);
    rec.gs_gather = gs_at_slot(rec.slot + 2);

    auto& inst = pr.inst;
    if (cfg.use_edge)
      for (int n = 0; n < N; ++n) inst.edge.push_back({cfg.edge_platform, n});
    if (cfg.use_ground) inst.ground = cfg.ground_platform;
    inst.workload = cfg.workload;
    inst.n_img = cfg.frame.n_img;
    inst.img_bits = cfg.frame.img_bits;
    inst.t_slot = cfg.t_slot;
    inst.ring_size = N;
    inst.d_isl_m = d_isl;
    inst.link = cfg.link;
    inst.convention = cfg.convention;
    if (cs.cohosted_observer) {
      inst.source = 0;
    } else {
      // Frame enters the ring at the nearest edge satellite.
      const auto pos = geometry::propagate(cs, so.otw.timestamp);
      const Vec3 o = pos.observers.at(static_cast<std::size_t>(so.otw.sat_id));
      double best = 1e300;
      for (int n = 0; n < N; ++n) {
        const double d = (pos.edge[n] - o).norm();
        if (d < best) {
          best = d;
          inst.source = n;
        }
      }
      inst.source_extra_hops = 1;
      inst.source_extra_range_m = best * 1e3;
    }
    if (rec.gs_scatter.in_contact()) {
      inst.dl_sat_scatter = rec.gs_scatter.sat;
      inst.rate_scatter_bps = rec.gs_scatter.rate_bps;
      inst.d_eg_scatter_m = rec.gs_scatter.slant_m;
    }
    if (rec.gs_gather.in_contact()) {
      inst.dl_sat_gather = rec.gs_gather.sat;
      inst.rate_gather_bps = rec.gs_gather.rate_bps;
      inst.d_eg_gather_m = rec.gs_gather.slant_m;
    }

    try {
      const auto plan = proc::solve(inst);
      rec.x = plan.x;
      pr.images = apportion(plan.x, cfg.frame.n_img);
      pr.x_int.resize(plan.x.size());
      pr.f.assign(plan.x.size(), 0.0);
      pr.per_image.resize(plan.x.size());
      for (std::size_t p = 0; p < plan.x.size(); ++p) {
        pr.x_int[p] = static_cast<double>(pr.images[p]) / cfg.frame.n_img;
        if (pr.images[p] == 0) continue;
        const auto& pl = inst.platform(p);
        try {
          pr.f[p] = compute::optimal_frequency(pl, cfg.workload, pr.images[p], cfg.t_slot);
        } catch (const InfeasibleLoadError&) {
          pr.f[p] = pl.f_max_hz;  // rounding pushed one image over the cap
        }
        pr.per_image[p] =
            compute::matched_gamma(inst.is_ground(p) ? ground_model : edge_model, pl, pr.f[p], cfg.workload);
      }
      pr.comm = proc::energy_breakdown(inst, pr.x_int, pr.f);
      pr.planned = pr.comm.total();
      pr.feasible = true;
    } catch (const InfeasibleAllocationError& e) {
      pr.failure = e.what();
    }
    rec.feasible = pr.feasible;
    rec.failure = pr.failure;
    rec.images = pr.images;
    rec.f_hz = pr.f;
    rec.planned_energy_j = pr.planned;
    if (!pr.feasible) {
      ++res.dropped;
      res.all_feasible = false;
    }
  }

  // Slots touched by the episode.
  std::map<int, SlotRecord> slots;
  auto slot = [&](int k) -> SlotRecord& {
    auto& s = slots[k];
    s.slot = k;
    return s;
  };
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const auto& rec = res.observations[i];
    auto& s0 = slot(rec.slot);
    s0.captured.push_back(rec.index);
    s0.gs = rec.gs_scatter;
    slot(rec.slot + 2).gs = rec.gs_gather;
    if (!prep[i].feasible) continue;
    const double D = prep[i].inst.frame_bits();
    for (std::size_t p = 0; p < prep[i].images.size(); ++p)
      if (prep[i].images[p] > 0) ++slot(rec.slot + 1).busy_nodes;
    s0.scatter_bits += D;
    double gb = 0.0;
    for (std::size_t p = 0; p < prep[i].inst.edge.size(); ++p) gb += prep[i].x_int[p] * D / cfg.workload.rho;
    slot(rec.slot + 2).gather_bits += gb;
  }

  // Monte Carlo over execution time (and turbulence when gated).
  const std::size_t M = observations.size();
  std::vector<std::vector<double>> obs_energy(M);
  std::vector<std::array<CompensatedSum, kCategoryCount>> obs_cat(M);
  std::vector<CompensatedSum> obs_delay(M);
  std::map<int, std::array<CompensatedSum, kCategoryCount>> slot_cat;
  std::array<CompensatedSum, kCategoryCount> total_cat;
  std::size_t delivered_all = 0, attempted_all = 0;

  for (int r = 0; r < cfg.replicas; ++r) {
    Rng exec_rng = make_rng(cfg.seed, Stream::kExecTime, static_cast<std::uint64_t>(r));
    atmosphere::Cn2Sampler sampler(cfg.turbulence, derive_seed(cfg.seed, static_cast<std::uint64_t>(Stream::kTurbulence),
                                                                static_cast<std::uint64_t>(r)));
    for (std::size_t i = 0; i < M; ++i) {
      auto& rec = res.observations[i];
      const auto& pr = prep[i];
      EnergyLedger e;
      e.joules[kManeuver] = observations[i].maneuver_energy_j;
      bool accepted = true;
      if (cfg.turbulence_gate) accepted = atmosphere::gate_observation(cfg.turbulence, sampler.draw());
      bool delivered = false;
      if (accepted && pr.feasible) {
        ++rec.accepted;
        ++attempted_all;
        e.joules[kScatterIsl] = pr.comm.scatter_isl;
        e.joules[kScatterDl] = pr.comm.scatter_dl;
        e.joules[kGatherIsl] = pr.comm.gather_isl;
        e.joules[kGatherDl] = pr.comm.gather_dl;
        const auto& inst = pr.inst;
        const double D = inst.frame_bits();
        double td = 0.0;
        bool ground_late = false;
        for (std::size_t p = 0; p < pr.images.size(); ++p) {
          if (pr.images[p] == 0) continue;
          const auto& pl = inst.platform(p);
          const auto batch = compute::batch_exec_distribution(pr.per_image[p], pr.images[p]);
          const double tp = compute::sample_gamma(batch.gamma, exec_rng);
          const double ep = compute::power_at(pl, pr.f[p]) * tp;
          if (inst.is_ground(p)) {
            e.joules[kProcessingGround] += ep;
            ground_late = tp > 2.0 * cfg.t_slot;
          } else {
            e.joules[kProcessingEdge] += ep;
            const auto route = network::route_to_ground(N, inst.edge[p].ring_index, inst.dl_sat_gather);
            const double comm = network::comm_latency_compressed(route, pr.x_int[p] * D, cfg.workload.rho, cfg.link,
                                                                 d_isl, inst.rate_gather_bps, inst.d_eg_gather_m);
            td = std::max(td, comm + std::max(tp - cfg.t_slot, 0.0));
          }
        }
        double comp_bits = 0.0;
        for (std::size_t p = 0; p < inst.edge.size(); ++p) comp_bits += pr.x_int[p] * D / cfg.workload.rho;
        const double raw_bits = inst.ground ? pr.x_int.back() * D : 0.0;
        delivered = td < cfg.t_slot && !ground_late &&
                    (comp_bits <= 0.0 || comp_bits <= (cfg.t_slot - td) * inst.rate_gather_bps) &&
                    (raw_bits <= 0.0 || raw_bits <= cfg.t_slot * inst.rate_scatter_bps);
        obs_delay[i].add(td);
        obs_energy[i].push_back(e.total_without_maneuver());
        if (delivered) {
          ++rec.delivered;
          ++delivered_all;
        }
      }
      for (int c = 0; c < kCategoryCount; ++c) {
        obs_cat[i][c].add(e.joules[c]);
        total_cat[c].add(e.joules[c]);
      }
      // Slot attribution: capture/scatter in k, processing in k+1, gather in k+2.
      auto& sk = slot_cat[rec.slot];
      sk[kManeuver].add(e.joules[kManeuver]);
      sk[kScatterIsl].add(e.joules[kScatterIsl]);
      sk[kScatterDl].add(e.joules[kScatterDl]);
      auto& sk1 = slot_cat[rec.slot + 1];
      sk1[kProcessingEdge].add(e.joules[kProcessingEdge]);
      sk1[kProcessingGround].add(e.joules[kProcessingGround]);
      auto& sk2 = slot_cat[rec.slot + 2];
      sk2[kGatherIsl].add(e.joules[kGatherIsl]);
      sk2[kGatherDl].add(e.joules[kGatherDl]);
      if (accepted && pr.feasible) (delivered ? slot(rec.slot + 2).delivered : slot(rec.slot + 2).failed)++;
    }
  }

  const double R = cfg.replicas;
  for (std::size_t i = 0; i < M; ++i) {
    auto& rec = res.observations[i];
    for (int c = 0; c < kCategoryCount; ++c) rec.mean.joules[c] = obs_cat[i][c].value() / R;
    if (!obs_energy[i].empty()) {
      CompensatedSum s;
      for (double v : obs_energy[i]) s.add(v);
      rec.energy_mean = s.value() / obs_energy[i].size();
      rec.energy_q05 = sample_quantile(obs_energy[i], 0.05);
      rec.energy_q95 = sample_quantile(obs_energy[i], 0.95);
      rec.t_delay_mean = obs_delay[i].value() / obs_energy[i].size();
    }
  }
  for (auto& [k, cat] : slot_cat)
    for (int c = 0; c < kCategoryCount; ++c) slot(k).energy.joules[c] = cat[c].value() / R;
  for (int c = 0; c < kCategoryCount; ++c) res.ledger.joules[c] = total_cat[c].value() / R;
  for (auto& [k, s] : slots) res.slots.push_back(s);
  res.mean_power_w = res.ledger.total_without_maneuver() / cfg.duration_s;
  res.delivered_fraction = attempted_all ? static_cast<double>(delivered_all) / attempted_all : 0.0;
  return res;
}

std::vector<SweepPoint> sweep(const EpisodeConfig& base, const std::vector<obs::ScheduledObservation>& observations,
                              const std::vector<compute::PlatformSpec>& platforms, const std::vector<double>& t_slots) {
  if (platforms.empty() || t_slots.empty()) throw ConfigError("sweep grid is empty");
  std::vector<SweepPoint> out;
  for (const auto& pl : platforms)
    for (double t : t_slots) {
      EpisodeConfig cfg = base;
      cfg.edge_platform = pl;
      cfg.t_slot = t;
      const auto r = run(cfg, observations);
      out.push_back({pl.id, t, r.mean_power_w, r.all_feasible, r.dropped, r.delivered_fraction});
    }
  return out;
}

double sample_quantile(std::vector<double> v, double q) {
  if (v.empty()) throw DomainError("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double h = q * (v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - lo) * (v[hi] - v[lo]);
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

std::string observations_csv(const RunResult& r) {
  std::ostringstream os;
  os << "index,otw,target,timestamp,slot,overlap,feasible,gs_scatter,rate_scatter_bps,gs_gather,rate_gather_bps,"
        "accepted,delivered,energy_mean_j,energy_q05_j,energy_q95_j,t_delay_mean_s";
  for (int c = 0; c < kCategoryCount; ++c) os << ',' << category_name(c) << "_j";
  os << '\n';
  for (const auto& o : r.observations) {
    os << o.index << ',' << o.otw.id << ',' << o.otw.target_id << ',' << fmt(o.otw.timestamp) << ',' << o.slot << ','
       << o.overlap << ',' << (o.feasible ? 1 : 0) << ',' << o.gs_scatter.station_id << ','
       << fmt(o.gs_scatter.rate_bps) << ',' << o.gs_gather.station_id << ',' << fmt(o.gs_gather.rate_bps) << ','
       << o.accepted << ',' << o.delivered << ',' << fmt(o.energy_mean) << ',' << fmt(o.energy_q05) << ','
       << fmt(o.energy_q95) << ',' << fmt(o.t_delay_mean);
    for (int c = 0; c < kCategoryCount; ++c) os << ',' << fmt(o.mean.joules[c]);
    os << '\n';
  }
  return os.str();
}

std::string slots_csv(const RunResult& r) {
  std::ostringstream os;
  os << "slot,captured,gs,downlink_sat,rate_bps,scatter_bits,gather_bits,busy_nodes,delivered,failed";
  for (int c = 0; c < kCategoryCount; ++c) os << ',' << category_name(c) << "_j";
  os << '\n';
  for (const auto& s : r.slots) {
    os << s.slot << ',' << s.captured.size() << ',' << s.gs.station_id << ',' << s.gs.sat << ',' << fmt(s.gs.rate_bps)
       << ',' << fmt(s.scatter_bits) << ',' << fmt(s.gather_bits) << ',' << s.busy_nodes << ',' << s.delivered << ','
       << s.failed;
    for (int c = 0; c < kCategoryCount; ++c) os << ',' << fmt(s.energy.joules[c]);
    os << '\n';
  }
  return os.str();
}

std::string sweep_csv(const std::vector<SweepPoint>& pts) {
  std::ostringstream os;
  os << "platform,t_slot_s,mean_power_w,feasible,dropped,delivered_fraction\n";
  for (const auto& p : pts)
    os << p.platform << ',' << fmt(p.t_slot) << ',' << fmt(p.mean_power_w) << ',' << (p.feasible ? 1 : 0) << ','
       << p.dropped << ',' << fmt(p.delivered_fraction) << '\n';
  return os.str();
}

nlohmann::json summary_json(const EpisodeConfig& cfg, const RunResult& r) {
  nlohmann::json j;
  j["edge_platform"] = cfg.edge_platform.id;
  j["ground_platform"] = cfg.use_ground ? nlohmann::json(cfg.ground_platform.id) : nlohmann::json(nullptr);
  j["t_slot_s"] = cfg.t_slot;
  j["duration_s"] = r.duration_s;
  j["replicas"] = cfg.replicas;
  j["seed"] = cfg.seed;
  j["observations"] = r.observations.size();
  j["dropped"] = r.dropped;
  j["all_feasible"] = r.all_feasible;
  j["delivered_fraction"] = r.delivered_fraction;
  j["mean_power_w"] = r.mean_power_w;
  nlohmann::json ledger;
  for (int c = 0; c < kCategoryCount; ++c) ledger[category_name(c)] = r.ledger.joules[c];
  ledger["total"] = r.ledger.total();
  j["ledger_j"] = ledger;
  std::map<int, int> stations;
  for (const auto& o : r.observations)
    if (o.gs_gather.station_id >= 0) ++stations[o.gs_gather.station_id];
  nlohmann::json st = nlohmann::json::object();
  for (auto& [id, n] : stations) st[std::to_string(id)] = n;
  j["gather_stations"] = st;
  return j;
}

}  // namespace orbitedge::pipeline
