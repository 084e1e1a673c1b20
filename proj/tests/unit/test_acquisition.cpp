#include <cmath>

#include <gtest/gtest.h>

#include "orbitedge/acquisition.hpp"
#include "orbitedge/errors.hpp"
#include "orbitedge/oracle.hpp"

using namespace orbitedge;
using namespace orbitedge::acquisition;

TEST(Acquisition, TransitionLawBranches) {
  EXPECT_DOUBLE_EQ(transition_time_for_angle(5.0), 11.66);
  EXPECT_DOUBLE_EQ(transition_time_for_angle(20.0), 5.0 + 20.0 / 1.5);
  EXPECT_DOUBLE_EQ(transition_time_for_angle(45.0), 10.0 + 45.0 / 2.0);
  EXPECT_DOUBLE_EQ(transition_time_for_angle(75.0), 16.0 + 75.0 / 2.5);
  EXPECT_DOUBLE_EQ(transition_time_for_angle(100.0), 22.0 + 100.0 / 3.0);
  EXPECT_NEAR(transition_time_for_angle(100.0), 55.33, 0.005);
}

TEST(Acquisition, TransitionLawBoundaries) {
  const double d = 1e-9;
  EXPECT_DOUBLE_EQ(transition_time_for_angle(10.0), 11.66);
  EXPECT_DOUBLE_EQ(transition_time_for_angle(10.0 + d), 5.0 + (10.0 + d) / 1.5);
  EXPECT_DOUBLE_EQ(transition_time_for_angle(30.0), 5.0 + 30.0 / 1.5);
  EXPECT_DOUBLE_EQ(transition_time_for_angle(30.0 + d), 10.0 + (30.0 + d) / 2.0);
  EXPECT_DOUBLE_EQ(transition_time_for_angle(60.0), 10.0 + 60.0 / 2.0);
  EXPECT_DOUBLE_EQ(transition_time_for_angle(60.0 + d), 16.0 + (60.0 + d) / 2.5);
  EXPECT_DOUBLE_EQ(transition_time_for_angle(90.0), 16.0 + 90.0 / 2.5);
  EXPECT_DOUBLE_EQ(transition_time_for_angle(90.0 + d), 22.0 + (90.0 + d) / 3.0);
  for (double a : {0.0, 3.0, 10.0, 10.5, 29.0, 31.0, 59.5, 61.0, 89.0, 91.0, 170.0})
    EXPECT_DOUBLE_EQ(transition_time_for_angle(a), oracle::slew_seconds(a)) << a;
}

TEST(Acquisition, TransitionUsesSummedAxes) {
  ObservationWindow a, b;
  a.attitude = {10.0, -5.0, 0.0};
  b.attitude = {-2.0, 3.0, 0.0};
  EXPECT_DOUBLE_EQ(total_transition_angle(a.attitude, b.attitude), 20.0);
  EXPECT_DOUBLE_EQ(transition_time(a, b), 5.0 + 20.0 / 1.5);
}

TEST(Acquisition, ManeuverEnergy) {
  AgilitySpec ag;
  EXPECT_NEAR(maneuver_energy(11.66, ag), 23.32, 1e-12);
  EXPECT_EQ(maneuver_energy(0.0, ag), 0.0);
  EXPECT_THROW(maneuver_energy(-1.0, ag), DomainError);
}

TEST(Acquisition, ProfitFromGsd) {
  AgilitySpec ag;
  EXPECT_DOUBLE_EQ(observation_profit(0.31, ag), 1.0);
  EXPECT_NEAR(observation_profit(0.43, ag), 0.7209, 5e-5);
  EXPECT_LT(observation_profit(1e9, ag), 1e-8);
  EXPECT_THROW(observation_profit(0.2, ag), InvalidGeometryError);
}

TEST(Acquisition, GsdLaw) {
  AgilitySpec ag;
  EXPECT_DOUBLE_EQ(gsd_at_geometry(617.0, 617.0, 0.0, ag), 0.31);
  EXPECT_NEAR(gsd_at_geometry(617.0, 617.0, 60.0, ag), 0.62, 1e-12);
  EXPECT_THROW(gsd_at_geometry(617.0, 617.0, 90.0, ag), InvalidGeometryError);
}

namespace {

struct Pass {
  geometry::OrbitalElements sat;
  geometry::Target target;
  double t_nadir = 300.0;
};

Pass nadir_pass() {
  Pass p;
  const auto [lat, lon] = geometry::subpoint(geometry::position_ecef(p.sat, p.t_nadir));
  p.target = {3, lat, lon};
  return p;
}

}  // namespace

TEST(Acquisition, DiscretizationCountsSteps) {
  const auto p = nadir_pass();
  AgilitySpec ag;
  geometry::VisibilityWindow vtw{0, 3, 0, p.t_nadir - 15.0, p.t_nadir + 15.0};
  const auto otws = discretize_vtw(vtw, ag, p.sat, p.target);
  ASSERT_EQ(otws.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(otws[i].timestamp, vtw.start + 10.0 * i);
}

TEST(Acquisition, NadirInstantHasZeroAttitudeAndBestProfit) {
  const auto p = nadir_pass();
  AgilitySpec ag;
  geometry::VisibilityWindow vtw{0, 3, 0, p.t_nadir - 60.0, p.t_nadir + 60.0};
  const auto otws = discretize_vtw(vtw, ag, p.sat, p.target);
  ASSERT_FALSE(otws.empty());
  const ObservationWindow* best = nullptr;
  double min_off = 1e9;
  const ObservationWindow* closest = nullptr;
  for (const auto& w : otws) {
    if (!best || w.profit > best->profit) best = &w;
    const Vec3 sat = geometry::position_ecef(p.sat, w.timestamp);
    const double off = geometry::off_nadir_deg(sat, geometry::ground_ecef(p.target.lat_deg, p.target.lon_deg));
    if (off < min_off) {
      min_off = off;
      closest = &w;
    }
  }
  EXPECT_EQ(best, closest);
  EXPECT_DOUBLE_EQ(best->timestamp, p.t_nadir);
  EXPECT_NEAR(best->attitude.roll_deg, 0.0, 1e-6);
  EXPECT_NEAR(best->attitude.pitch_deg, 0.0, 1e-6);
  EXPECT_NEAR(best->profit, 1.0, 1e-9);
}

TEST(Acquisition, OutOfReachTargetGivesNoOtws) {
  auto p = nadir_pass();
  p.target.lat_deg = -p.target.lat_deg;
  AgilitySpec ag;
  geometry::VisibilityWindow vtw{0, 3, 0, p.t_nadir - 20.0, p.t_nadir + 20.0};
  EXPECT_TRUE(discretize_vtw(vtw, ag, p.sat, p.target).empty());
}
