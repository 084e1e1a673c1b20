#include "orbitedge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "orbitedge/errors.hpp"

namespace orbitedge::geometry {

namespace {

void check_elements(const OrbitalElements& el, const std::string& what) {
  if (!(el.altitude_km > 0.0)) throw DomainError(what + ": altitude must be positive");
  if (el.inclination_deg < 0.0 || el.inclination_deg > 180.0)
    throw DomainError(what + ": inclination must lie in [0, 180] deg");
}

}  // namespace

void ConstellationSpec::validate() const {
  if (n_sats_edge < 1) throw InvalidTopologyError("constellation needs at least one edge satellite");
  if (n_planes < 1 || n_sats_edge % n_planes != 0)
    throw InvalidTopologyError("edge satellites must divide evenly into planes");
  if (!(earth_radius_km > 0.0)) throw DomainError("earth radius must be positive");
  check_elements({altitude_e_km, inclination_e_deg, raan_e_deg, 0.0}, "edge layer");
  if (!cohosted_observer) {
    if (obs_sats.empty()) throw InvalidTopologyError("no observation satellites defined");
    for (std::size_t i = 0; i < obs_sats.size(); ++i)
      check_elements(obs_sats[i], "observation satellite " + std::to_string(i));
  }
}

void GroundStationSet::validate() const {
  if (stations.empty()) throw ConfigError("ground station set is empty");
  for (const auto& s : stations) {
    if (s.lat_deg < -90.0 || s.lat_deg > 90.0)
      throw DomainError("station " + std::to_string(s.id) + ": latitude out of range");
  }
}

double orbital_period(double altitude_km, double earth_radius_km) {
  const double a = (earth_radius_km + altitude_km) * 1e3;
  return 2.0 * kPi * std::sqrt(a * a * a / kEarthMu);
}

OrbitalElements edge_elements(const ConstellationSpec& spec, int index) {
  const int per_plane = spec.n_sats_edge / spec.n_planes;
  const int plane = index / per_plane;
  const int slot = index % per_plane;
  OrbitalElements el;
  el.altitude_km = spec.altitude_e_km;
  el.inclination_deg = spec.inclination_e_deg;
  el.raan_deg = spec.raan_e_deg + 180.0 * plane / spec.n_planes;
  el.phase_deg = spec.phase_offset_e_deg + 360.0 * slot / per_plane;
  return el;
}

std::vector<OrbitalElements> observer_elements(const ConstellationSpec& spec) {
  if (spec.cohosted_observer) return {edge_elements(spec, 0)};
  return spec.obs_sats;
}

StateVector state_eci(const OrbitalElements& el, double t, double earth_radius_km) {
  const double r = earth_radius_km + el.altitude_km;
  const double n = 2.0 * kPi / orbital_period(el.altitude_km, earth_radius_km);
  const double u = deg2rad(el.phase_deg) + n * t;
  const double raan = deg2rad(el.raan_deg);
  const double inc = deg2rad(el.inclination_deg);
  const double cu = std::cos(u), su = std::sin(u);
  const double co = std::cos(raan), so = std::sin(raan);
  const double ci = std::cos(inc), si = std::sin(inc);
  // Perifocal-to-inertial for a circular orbit, written out.
  const Vec3 p{co, so, 0.0};              // ascending node direction
  const Vec3 q{-so * ci, co * ci, si};    // 90 deg ahead in the orbit plane
  StateVector sv;
  sv.position = (p * cu + q * su) * r;
  sv.velocity = (p * (-su) + q * cu) * (r * n);
  return sv;
}

Vec3 eci_to_ecef(const Vec3& v, double t) {
  const double a = kEarthRotationRate * t;
  const double c = std::cos(a), s = std::sin(a);
  return {c * v.x + s * v.y, -s * v.x + c * v.y, v.z};
}

Vec3 ecef_to_eci(const Vec3& v, double t) {
  const double a = kEarthRotationRate * t;
  const double c = std::cos(a), s = std::sin(a);
  return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

Vec3 position_ecef(const OrbitalElements& el, double t, double earth_radius_km) {
  return eci_to_ecef(state_eci(el, t, earth_radius_km).position, t);
}

Vec3 ground_ecef(double lat_deg, double lon_deg, double earth_radius_km) {
  const double lat = deg2rad(lat_deg), lon = deg2rad(lon_deg);
  return {earth_radius_km * std::cos(lat) * std::cos(lon),
          earth_radius_km * std::cos(lat) * std::sin(lon), earth_radius_km * std::sin(lat)};
}

std::pair<double, double> subpoint(const Vec3& ecef) {
  const double r = ecef.norm();
  return {rad2deg(std::asin(ecef.z / r)), rad2deg(std::atan2(ecef.y, ecef.x))};
}

SatellitePositions propagate(const ConstellationSpec& spec, double t) {
  SatellitePositions out;
  out.edge.reserve(spec.n_sats_edge);
  for (int i = 0; i < spec.n_sats_edge; ++i)
    out.edge.push_back(position_ecef(edge_elements(spec, i), t, spec.earth_radius_km));
  for (const auto& el : observer_elements(spec))
    out.observers.push_back(position_ecef(el, t, spec.earth_radius_km));
  return out;
}

double isl_slant_range(int n, double altitude_km, double earth_radius_km) {
  if (n < 2) throw InvalidTopologyError("an ISL ring needs at least two satellites");
  return 2.0 * (earth_radius_km + altitude_km) * std::sin(kPi / n);
}

double off_nadir_deg(const Vec3& sat, const Vec3& point) {
  const Vec3 los = point - sat;
  const Vec3 nadir = -sat;
  const double c = los.dot(nadir) / (los.norm() * nadir.norm());
  return rad2deg(std::acos(std::clamp(c, -1.0, 1.0)));
}

double elevation_deg(const Vec3& point, const Vec3& sat) {
  const Vec3 los = sat - point;
  const double s = los.dot(point) / (los.norm() * point.norm());
  return rad2deg(std::asin(std::clamp(s, -1.0, 1.0)));
}

double slant_range_at_elevation(double altitude_km, double elevation_deg, double earth_radius_km) {
  const double s = std::sin(deg2rad(elevation_deg));
  const double re = earth_radius_km;
  return std::sqrt(re * re * s * s + 2.0 * re * altitude_km + altitude_km * altitude_km) - re * s;
}

namespace {

bool pointable(const Vec3& sat, const Vec3& tgt, double max_off_nadir) {
  return elevation_deg(tgt, sat) > 0.0 && off_nadir_deg(sat, tgt) <= max_off_nadir;
}

// Shrinks [outside, inside] until it is narrower than tol and returns the
// inside end, so the returned instant always satisfies the predicate.
template <typename Pred>
double refine_edge(double outside, double inside, double tol, Pred&& visible) {
  while (std::abs(inside - outside) > tol) {
    const double mid = 0.5 * (inside + outside);
    if (visible(mid)) inside = mid;
    else outside = mid;
  }
  return inside;
}

}  // namespace

std::vector<VisibilityWindow> compute_visibility_windows(const ConstellationSpec& spec,
                                                         const std::vector<Target>& targets,
                                                         double horizon_s, double max_off_nadir_deg,
                                                         const VisibilityOptions& opts) {
  return compute_visibility_windows(spec, targets, 0.0, horizon_s, max_off_nadir_deg, opts);
}

std::vector<VisibilityWindow> compute_visibility_windows(const ConstellationSpec& spec,
                                                         const std::vector<Target>& targets,
                                                         double t_begin, double t_end,
                                                         double max_off_nadir_deg,
                                                         const VisibilityOptions& opts) {
  if (!(t_end > t_begin)) throw DomainError("visibility horizon must be positive");
  if (!(opts.step_s > 0.0)) throw DomainError("visibility step must be positive");
  std::vector<VisibilityWindow> out;
  if (targets.empty()) return out;

  const auto observers = observer_elements(spec);
  const double re = spec.earth_radius_km;
  std::vector<Vec3> tgt_ecef;
  tgt_ecef.reserve(targets.size());
  for (const auto& t : targets) {
    if (t.lat_deg < -90.0 || t.lat_deg > 90.0)
      throw DomainError("target " + std::to_string(t.id) + ": latitude out of range");
    tgt_ecef.push_back(ground_ecef(t.lat_deg, t.lon_deg, re));
  }

  // A target can only be pointable when within this Earth-central angle of
  // the sub-satellite point; used to skip the exact test cheaply.
  for (std::size_t s = 0; s < observers.size(); ++s) {
    const auto& el = observers[s];
    const double r = re + el.altitude_km;
    const double eta = deg2rad(std::min(max_off_nadir_deg, 89.999));
    const double sin_inc = std::min(1.0, r / re * std::sin(eta));
    const double central = std::asin(sin_inc) - eta;
    const double cos_gate = std::cos(std::min(kPi, central + 0.02));
    const double period = orbital_period(el.altitude_km, re);

    auto sat_at = [&](double t) { return position_ecef(el, t, re); };

    std::vector<double> open_since(targets.size(), -1.0);
    std::vector<char> inside(targets.size(), 0);
    const int n_steps = static_cast<int>(std::floor((t_end - t_begin) / opts.step_s + 1e-9));
    double prev = t_begin;
    for (int k = 0; k <= n_steps + 1; ++k) {
      const bool past_end = k > n_steps;
      const double t = past_end ? t_end : t_begin + k * opts.step_s;
      if (past_end && t <= prev) break;
      const Vec3 sat = sat_at(t);
      const Vec3 sub = sat.normalized();
      for (std::size_t j = 0; j < targets.size(); ++j) {
        const Vec3& g = tgt_ecef[j];
        bool vis = false;
        if (g.dot(sub) / re >= cos_gate) vis = pointable(sat, g, max_off_nadir_deg);
        if (vis == static_cast<bool>(inside[j])) continue;
        auto visible = [&](double tt) { return pointable(sat_at(tt), g, max_off_nadir_deg); };
        if (vis) {
          open_since[j] = (k == 0) ? t : refine_edge(prev, t, opts.edge_tolerance_s, visible);
          inside[j] = 1;
        } else {
          const double end = refine_edge(t, prev, opts.edge_tolerance_s, visible);
          if (end > open_since[j]) {
            out.push_back({static_cast<int>(s), targets[j].id,
                           static_cast<int>(std::floor(open_since[j] / period)), open_since[j], end});
          }
          inside[j] = 0;
        }
      }
      prev = t;
      if (past_end) break;
    }
    // Windows still open at the end of the horizon are clipped there.
    for (std::size_t j = 0; j < targets.size(); ++j) {
      if (inside[j] && t_end > open_since[j]) {
        out.push_back({static_cast<int>(s), targets[j].id,
                       static_cast<int>(std::floor(open_since[j] / period)), open_since[j], t_end});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const VisibilityWindow& a, const VisibilityWindow& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.sat_id != b.sat_id) return a.sat_id < b.sat_id;
    return a.target_id < b.target_id;
  });
  return out;
}

std::vector<Contact> all_contacts(const ConstellationSpec& spec, const GroundStationSet& gs,
                                  double t) {
  const auto pos = propagate(spec, t);
  std::vector<Contact> out;
  for (const auto& st : gs.stations) {
    const Vec3 g = ground_ecef(st.lat_deg, st.lon_deg, spec.earth_radius_km);
    for (int e = 0; e < spec.n_sats_edge; ++e) {
      const double el = elevation_deg(g, pos.edge[e]);
      if (el >= st.min_elevation_deg) out.push_back({st.id, e, (pos.edge[e] - g).norm(), el});
    }
  }
  return out;
}

std::vector<std::optional<Contact>> gs_contact(const ConstellationSpec& spec,
                                               const GroundStationSet& gs, double t) {
  const auto pos = propagate(spec, t);
  std::vector<std::optional<Contact>> out;
  out.reserve(gs.stations.size());
  for (const auto& st : gs.stations) {
    const Vec3 g = ground_ecef(st.lat_deg, st.lon_deg, spec.earth_radius_km);
    std::optional<Contact> best;
    for (int e = 0; e < spec.n_sats_edge; ++e) {
      const double el = elevation_deg(g, pos.edge[e]);
      if (el < st.min_elevation_deg) continue;
      if (!best || el > best->elevation_deg) best = Contact{st.id, e, (pos.edge[e] - g).norm(), el};
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace orbitedge::geometry
