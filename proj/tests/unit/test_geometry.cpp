#include <cmath>

#include <gtest/gtest.h>

#include "orbitedge/errors.hpp"
#include "orbitedge/geometry.hpp"
#include "orbitedge/oracle.hpp"

using namespace orbitedge;
using namespace orbitedge::geometry;

namespace {

ConstellationSpec single_observer() {
  ConstellationSpec cs;
  cs.n_sats_edge = 1;
  cs.altitude_e_km = 617.0;
  cs.inclination_e_deg = 98.6;
  return cs;
}

}  // namespace

TEST(Geometry, OrbitRadiusAtEpoch) {
  OrbitalElements el;
  const Vec3 p = position_ecef(el, 0.0);
  EXPECT_NEAR(p.norm(), 6988.0, 1e-9);
}

TEST(Geometry, PeriodMatchesKepler) {
  const double a = 6.988e6, mu = 3.986e14;
  const double oracle = 2.0 * M_PI * std::sqrt(a * a * a / mu);
  EXPECT_NEAR(orbital_period(617.0), oracle, 1e-3 * oracle);
  EXPECT_NEAR(orbital_period(617.0), 5.8e3, 0.05e3);
}

TEST(Geometry, InertialPositionRepeatsAfterOnePeriod) {
  OrbitalElements el;
  el.raan_deg = 40.0;
  el.phase_deg = 17.0;
  const double T = orbital_period(el.altitude_km);
  const Vec3 a = state_eci(el, 123.0).position;
  const Vec3 b = state_eci(el, 123.0 + T).position;
  EXPECT_NEAR((a - b).norm(), 0.0, 1e-6);
}

TEST(Geometry, IslSlantRange) {
  EXPECT_NEAR(isl_slant_range(23, 617.0), 1903.1, 0.05);
  EXPECT_NEAR(isl_slant_range(2, 617.0), 2.0 * 6988.0, 1e-9);
  const int n = 5000;
  EXPECT_NEAR(isl_slant_range(n, 617.0), 2.0 * M_PI * 6988.0 / n, 1e-4);
  EXPECT_THROW(isl_slant_range(1, 617.0), InvalidTopologyError);
}

TEST(Geometry, SlantRangeAtTenDegrees) {
  const double R = 6371.0, h = 617.0, e = 10.0 * M_PI / 180.0;
  const double oracle = std::sqrt(R * R * std::sin(e) * std::sin(e) + 2 * R * h + h * h) - R * std::sin(e);
  EXPECT_NEAR(slant_range_at_elevation(617.0, 10.0), oracle, 1e-6);
}

TEST(Geometry, EdgeElementsSpreadPlanes) {
  ConstellationSpec cs;
  cs.n_sats_edge = 8;
  cs.n_planes = 2;
  cs.raan_e_deg = 10.0;
  EXPECT_NEAR(edge_elements(cs, 0).raan_deg, 10.0, 1e-12);
  EXPECT_NEAR(edge_elements(cs, 4).raan_deg, 100.0, 1e-12);
  EXPECT_NEAR(edge_elements(cs, 1).phase_deg - edge_elements(cs, 0).phase_deg, 90.0, 1e-12);
  cs.n_planes = 3;
  EXPECT_THROW(cs.validate(), InvalidTopologyError);
}

TEST(Geometry, TargetUnderSatelliteIsVisibleAtEpoch) {
  auto cs = single_observer();
  const auto [lat, lon] = subpoint(position_ecef(observer_elements(cs)[0], 0.0));
  const auto w = compute_visibility_windows(cs, {{7, lat, lon}}, 600.0, 30.0);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_LE(w[0].start, 0.0);
  EXPECT_GT(w[0].end, 0.0);
  EXPECT_EQ(w[0].target_id, 7);
}

TEST(Geometry, UnreachableTargetHasNoWindows) {
  auto cs = single_observer();
  // Antipode of the epoch subpoint; a short horizon never gets close.
  const auto [lat, lon] = subpoint(position_ecef(observer_elements(cs)[0], 0.0));
  const double alon = lon > 0 ? lon - 180.0 : lon + 180.0;
  EXPECT_TRUE(compute_visibility_windows(cs, {{1, -lat, alon}}, 900.0, 45.0).empty());
  EXPECT_TRUE(compute_visibility_windows(cs, {}, 900.0, 45.0).empty());
}

TEST(Geometry, VisibilityMatchesFineSweep) {
  auto cs = single_observer();
  const auto obs = observer_elements(cs);
  const auto [lat0, lon0] = subpoint(position_ecef(obs[0], 300.0));
  std::vector<Target> targets{{0, lat0, lon0 + 2.0}, {1, lat0 - 5.0, lon0 - 4.0}, {2, lat0 + 3.0, lon0 + 6.5}};
  const auto sys = compute_visibility_windows(cs, targets, 0.0, 900.0, 45.0, VisibilityOptions{});
  const auto ref = oracle::fine_sweep_visibility(obs, targets, 0.0, 900.0, 45.0);
  ASSERT_EQ(sys.size(), ref.size());
  for (const auto& r : ref) {
    bool matched = false;
    for (const auto& s : sys) {
      if (s.target_id != r.target || s.sat_id != r.sat) continue;
      EXPECT_NEAR(s.start, r.start, 0.2);
      EXPECT_NEAR(s.end, r.end, 0.2);
      matched = true;
    }
    EXPECT_TRUE(matched) << "target " << r.target;
  }
}

TEST(Geometry, ZenithContactAndMask) {
  ConstellationSpec cs;
  cs.n_sats_edge = 4;
  const auto [lat, lon] = subpoint(position_ecef(edge_elements(cs, 0), 0.0));
  GroundStationSet gs;
  gs.stations.push_back({0, "under", lat, lon, 5.0});
  gs.stations.push_back({1, "far", -lat, lon + 180.0 > 180.0 ? lon - 180.0 : lon + 180.0, 5.0});
  const auto c = gs_contact(cs, gs, 0.0);
  ASSERT_TRUE(c[0].has_value());
  EXPECT_EQ(c[0]->sat_id, 0);
  EXPECT_NEAR(c[0]->slant_km, 617.0, 1e-6);
  EXPECT_NEAR(c[0]->elevation_deg, 90.0, 1e-6);

  gs.stations[0].min_elevation_deg = 90.5;
  EXPECT_FALSE(gs_contact(cs, gs, 0.0)[0].has_value());
}
