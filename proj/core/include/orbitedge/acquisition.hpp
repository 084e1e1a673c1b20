#pragma once

#include <vector>

#include "orbitedge/geometry.hpp"

// Turns visibility windows into discrete observation opportunities and
// prices the attitude maneuvers between them.
namespace orbitedge::acquisition {

struct Attitude {
  double roll_deg = 0.0;
  double pitch_deg = 0.0;
  double yaw_deg = 0.0;
};

struct ObservationWindow {
  int id = 0;  // unique within an instance
  int sat_id = 0;
  int target_id = 0;
  int orbit = 0;
  int window_index = 0;
  double timestamp = 0.0;
  Attitude attitude;
  double profit = 0.0;
  double gsd = 0.0;  // m/pixel
  // Observation window of the parent VTW, kept for constraint checking.
  double vtw_start = 0.0;
  double vtw_end = 0.0;
};

struct AgilitySpec {
  double roll_max_deg = 45.0;
  double pitch_max_deg = 45.0;
  double yaw_max_deg = 90.0;
  double p_man_w = 2.0;
  double e_max_j = 1000.0;
  double prc_s = 10.0;
  double gsd_nadir = 0.31;

  void validate() const;
  // Largest off-nadir angle any OTW can have given the roll/pitch limits.
  double max_off_nadir_deg() const;
};

struct FrameSpec {
  int n_img = 2601;
  double img_bits = 788'513.0;
  double ship_bits = 6'913.0;
  int width_px = 600;
  int height_px = 600;

  double frame_bits() const { return n_img * img_bits; }
  void validate() const;
};

// Roll/pitch needed to put the boresight on `target` (both ECI, km).
// Yaw is left at zero.
Attitude pointing_attitude(const geometry::StateVector& sat_eci, const Vec3& target_eci);

double total_transition_angle(const Attitude& a, const Attitude& b);
// Piecewise-linear slew law on the total transition angle (deg) -> seconds.
double transition_time_for_angle(double alpha_deg);
double transition_time(const ObservationWindow& a, const ObservationWindow& b);

double maneuver_energy(double dt_s, const AgilitySpec& agility);

// Pushbroom approximation: GSD grows with slant range and with the local
// incidence angle at the target.
double gsd_at_geometry(double slant_km, double altitude_km, double incidence_deg,
                       const AgilitySpec& agility);
double observation_profit(double gsd, const AgilitySpec& agility);

// One OTW per `prc` step inside the window, dropped where the attitude
// limits cannot be met. Ids are left at zero; see build_otws.
std::vector<ObservationWindow> discretize_vtw(const geometry::VisibilityWindow& vtw,
                                              const AgilitySpec& agility,
                                              const geometry::OrbitalElements& sat,
                                              const geometry::Target& target,
                                              double earth_radius_km = kEarthRadiusKm);

// Discretizes every window and assigns consecutive ids (sorted by sat, time).
std::vector<ObservationWindow> build_otws(const geometry::ConstellationSpec& spec,
                                          const std::vector<geometry::Target>& targets,
                                          const std::vector<geometry::VisibilityWindow>& windows,
                                          const AgilitySpec& agility);

}  // namespace orbitedge::acquisition
