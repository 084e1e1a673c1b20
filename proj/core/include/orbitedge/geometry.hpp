#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orbitedge/constants.hpp"
#include "orbitedge/vec3.hpp"

// Circular two-body orbits over a spherical, uniformly rotating Earth.
// Positions are in km; ECI and ECEF coincide at t = 0.
namespace orbitedge::geometry {

struct OrbitalElements {
  double altitude_km = 617.0;
  double inclination_deg = 98.6;
  double raan_deg = 0.0;
  double phase_deg = 0.0;  // argument of latitude at t = 0
};

struct ConstellationSpec {
  int n_sats_edge = 23;
  double altitude_e_km = 617.0;
  double inclination_e_deg = 98.6;
  int n_planes = 1;
  double raan_e_deg = 0.0;
  double phase_offset_e_deg = 0.0;
  // When true the first edge satellite doubles as the (single) observation
  // satellite and `obs_sats` is ignored.
  bool cohosted_observer = true;
  std::vector<OrbitalElements> obs_sats;
  double earth_radius_km = kEarthRadiusKm;

  // Throws InvalidTopologyError / DomainError on bad values.
  void validate() const;
};

struct Target {
  int id = 0;
  double lat_deg = 0.0;
  double lon_deg = 0.0;
};

struct GroundStation {
  int id = 0;
  std::string name;
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double min_elevation_deg = 5.0;
};

struct GroundStationSet {
  std::vector<GroundStation> stations;
  void validate() const;
};

struct VisibilityWindow {
  int sat_id = 0;
  int target_id = 0;
  int orbit_index = 0;
  double start = 0.0;
  double end = 0.0;
};

struct StateVector {
  Vec3 position;  // km
  Vec3 velocity;  // km/s
};

struct Contact {
  int station_id = 0;
  int sat_id = 0;
  double slant_km = 0.0;
  double elevation_deg = 0.0;
};

struct SatellitePositions {
  std::vector<Vec3> edge;       // ECEF, km
  std::vector<Vec3> observers;  // ECEF, km
};

// Seconds per revolution of a circular orbit at the given altitude.
double orbital_period(double altitude_km, double earth_radius_km = kEarthRadiusKm);

// Elements of edge satellite `index`: planes are spread over 180 deg of RAAN
// (Walker star) and satellites evenly phased within their plane.
OrbitalElements edge_elements(const ConstellationSpec& spec, int index);
std::vector<OrbitalElements> observer_elements(const ConstellationSpec& spec);

StateVector state_eci(const OrbitalElements& el, double t, double earth_radius_km = kEarthRadiusKm);
Vec3 eci_to_ecef(const Vec3& v, double t);
Vec3 ecef_to_eci(const Vec3& v, double t);
Vec3 position_ecef(const OrbitalElements& el, double t, double earth_radius_km = kEarthRadiusKm);
Vec3 ground_ecef(double lat_deg, double lon_deg, double earth_radius_km = kEarthRadiusKm);

// Sub-satellite latitude/longitude in degrees.
std::pair<double, double> subpoint(const Vec3& ecef);

SatellitePositions propagate(const ConstellationSpec& spec, double t);

// Chord between neighbours of an evenly phased ring: 2 (R_E + h) sin(pi / N).
double isl_slant_range(int n, double altitude_km, double earth_radius_km = kEarthRadiusKm);

// Angle at the satellite between nadir and the line of sight to `point`.
double off_nadir_deg(const Vec3& sat, const Vec3& point);
// Elevation of `sat` as seen from ground `point`.
double elevation_deg(const Vec3& point, const Vec3& sat);
// Slant range for a satellite at altitude h seen at elevation eps.
double slant_range_at_elevation(double altitude_km, double elevation_deg,
                                double earth_radius_km = kEarthRadiusKm);

struct VisibilityOptions {
  double step_s = 1.0;
  double edge_tolerance_s = 0.1;
};

// Windows during which each observation satellite can point at each target
// within `max_off_nadir_deg`. Sorted by start time, then satellite, then target.
std::vector<VisibilityWindow> compute_visibility_windows(const ConstellationSpec& spec,
                                                         const std::vector<Target>& targets,
                                                         double horizon_s, double max_off_nadir_deg,
                                                         const VisibilityOptions& opts = {});

// Same, restricted to [t_begin, t_end).
std::vector<VisibilityWindow> compute_visibility_windows(const ConstellationSpec& spec,
                                                         const std::vector<Target>& targets,
                                                         double t_begin, double t_end,
                                                         double max_off_nadir_deg,
                                                         const VisibilityOptions& opts);

// Per station, the highest-elevation edge satellite if it clears the mask.
std::vector<std::optional<Contact>> gs_contact(const ConstellationSpec& spec,
                                               const GroundStationSet& gs, double t);

// Every (station, edge satellite) pair above the station mask at time t.
std::vector<Contact> all_contacts(const ConstellationSpec& spec, const GroundStationSet& gs,
                                  double t);

}  // namespace orbitedge::geometry
