#include "orbitedge/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "orbitedge/errors.hpp"

namespace orbitedge::acquisition {

void AgilitySpec::validate() const {
  if (!(roll_max_deg > 0 && pitch_max_deg > 0 && yaw_max_deg > 0))
    throw ConfigError("attitude limits must be positive");
  if (!(p_man_w > 0 && e_max_j > 0)) throw ConfigError("maneuver power and energy budget must be positive");
  if (!(prc_s > 0)) throw ConfigError("OTW discretization step prc must be positive");
  if (!(gsd_nadir > 0)) throw ConfigError("nadir GSD must be positive");
}

double AgilitySpec::max_off_nadir_deg() const {
  const double tr = std::tan(deg2rad(std::min(roll_max_deg, 89.9)));
  const double tp = std::tan(deg2rad(std::min(pitch_max_deg, 89.9)));
  // Corner of the roll/pitch box: tan^2(off) = tan^2(pitch) + tan^2(roll)(1 + tan^2(pitch)).
  return rad2deg(std::atan(std::sqrt(tp * tp + tr * tr * (1.0 + tp * tp))));
}

void FrameSpec::validate() const {
  if (n_img < 1) throw ConfigError("a frame needs at least one image");
  if (!(img_bits > 0)) throw ConfigError("image size must be positive");
  if (width_px < 1 || height_px < 1) throw ConfigError("image resolution must be positive");
}

Attitude pointing_attitude(const geometry::StateVector& sat_eci, const Vec3& target_eci) {
  const Vec3 z = (-sat_eci.position).normalized();                           // nadir
  const Vec3 y = sat_eci.velocity.cross(sat_eci.position).normalized();      // -orbit normal
  const Vec3 x = y.cross(z);                                                 // along-track
  const Vec3 los = target_eci - sat_eci.position;
  const double a = los.dot(x), c = los.dot(y), d = los.dot(z);
  Attitude att;
  att.pitch_deg = rad2deg(std::atan2(a, d));
  att.roll_deg = rad2deg(std::atan2(c, std::hypot(a, d)));
  att.yaw_deg = 0.0;
  return att;
}

double total_transition_angle(const Attitude& a, const Attitude& b) {
  return std::abs(a.roll_deg - b.roll_deg) + std::abs(a.pitch_deg - b.pitch_deg) +
         std::abs(a.yaw_deg - b.yaw_deg);
}

double transition_time_for_angle(double alpha) {
  if (alpha <= 10.0) return 11.66;
  if (alpha <= 30.0) return 5.0 + alpha / 1.5;
  if (alpha <= 60.0) return 10.0 + alpha / 2.0;
  if (alpha <= 90.0) return 16.0 + alpha / 2.5;
  return 22.0 + alpha / 3.0;
}

double transition_time(const ObservationWindow& a, const ObservationWindow& b) {
  return transition_time_for_angle(total_transition_angle(a.attitude, b.attitude));
}

double maneuver_energy(double dt_s, const AgilitySpec& agility) {
  if (dt_s < 0.0) throw DomainError("maneuver duration must be non-negative");
  return agility.p_man_w * dt_s;
}

double gsd_at_geometry(double slant_km, double altitude_km, double incidence_deg,
                       const AgilitySpec& agility) {
  if (!(incidence_deg >= 0.0 && incidence_deg < 90.0))
    throw InvalidGeometryError("incidence angle must lie in [0, 90) deg");
  if (!(slant_km > 0.0 && altitude_km > 0.0)) throw InvalidGeometryError("ranges must be positive");
  return agility.gsd_nadir * (slant_km / altitude_km) / std::cos(deg2rad(incidence_deg));
}

double observation_profit(double gsd, const AgilitySpec& agility) {
  // Relative slack absorbs round-off at exact nadir.
  if (gsd < agility.gsd_nadir * (1.0 - 1e-12))
    throw InvalidGeometryError("GSD below the nadir GSD");
  return std::min(1.0, agility.gsd_nadir / gsd);
}

std::vector<ObservationWindow> discretize_vtw(const geometry::VisibilityWindow& vtw,
                                              const AgilitySpec& agility,
                                              const geometry::OrbitalElements& sat,
                                              const geometry::Target& target,
                                              double earth_radius_km) {
  std::vector<ObservationWindow> out;
  if (!(vtw.end >= vtw.start)) return out;
  const Vec3 tgt_ecef = geometry::ground_ecef(target.lat_deg, target.lon_deg, earth_radius_km);
  const int n = static_cast<int>(std::floor((vtw.end - vtw.start) / agility.prc_s + 1e-9));
  for (int w = 0; w <= n; ++w) {
    const double t = vtw.start + w * agility.prc_s;
    const auto sv = geometry::state_eci(sat, t, earth_radius_km);
    const Vec3 tgt = geometry::ecef_to_eci(tgt_ecef, t);
    const Attitude att = pointing_attitude(sv, tgt);
    if (std::abs(att.roll_deg) > agility.roll_max_deg || std::abs(att.pitch_deg) > agility.pitch_max_deg ||
        std::abs(att.yaw_deg) > agility.yaw_max_deg)
      continue;
    const double elev = geometry::elevation_deg(tgt, sv.position);
    if (!(elev > 0.0)) continue;
    const double slant = (sv.position - tgt).norm();
    const double incidence = 90.0 - elev;
    ObservationWindow o;
    o.sat_id = vtw.sat_id;
    o.target_id = vtw.target_id;
    o.orbit = vtw.orbit_index;
    o.window_index = w;
    o.timestamp = t;
    o.attitude = att;
    o.gsd = gsd_at_geometry(slant, sat.altitude_km, incidence, agility);
    o.profit = observation_profit(o.gsd, agility);
    o.vtw_start = vtw.start;
    o.vtw_end = vtw.end;
    out.push_back(o);
  }
  return out;
}

std::vector<ObservationWindow> build_otws(const geometry::ConstellationSpec& spec,
                                          const std::vector<geometry::Target>& targets,
                                          const std::vector<geometry::VisibilityWindow>& windows,
                                          const AgilitySpec& agility) {
  const auto observers = geometry::observer_elements(spec);
  std::unordered_map<int, const geometry::Target*> by_id;
  for (const auto& t : targets) by_id[t.id] = &t;
  std::vector<ObservationWindow> out;
  for (const auto& w : windows) {
    auto it = by_id.find(w.target_id);
    if (it == by_id.end() || w.sat_id < 0 || w.sat_id >= static_cast<int>(observers.size())) continue;
    auto part = discretize_vtw(w, agility, observers[w.sat_id], *it->second, spec.earth_radius_km);
    out.insert(out.end(), part.begin(), part.end());
  }
  std::stable_sort(out.begin(), out.end(), [](const ObservationWindow& a, const ObservationWindow& b) {
    if (a.sat_id != b.sat_id) return a.sat_id < b.sat_id;
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.target_id < b.target_id;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

}  // namespace orbitedge::acquisition
