#include <cmath>

#include <gtest/gtest.h>

#include "orbitedge/oracle.hpp"
#include "orbitedge/pipeline.hpp"
#include "orbitedge/scenario.hpp"
#include "orbitedge/experiments.hpp"

using namespace orbitedge;
using namespace orbitedge::pipeline;

namespace {

geometry::GroundStation station_under(const geometry::OrbitalElements& el, double t, int id) {
  const auto [lat, lon] = geometry::subpoint(geometry::position_ecef(el, t));
  return {id, "s" + std::to_string(id), lat, lon, 5.0};
}

obs::ScheduledObservation one_observation(double tau) {
  obs::ScheduledObservation so;
  so.otw.id = 0;
  so.otw.timestamp = tau;
  so.otw.profit = 1.0;
  return so;
}

EpisodeConfig single_node(double T) {
  EpisodeConfig c;
  c.constellation.n_sats_edge = 1;
  c.use_ground = false;
  c.t_slot = T;
  c.duration_s = 3 * T;
  c.replicas = 50;
  const auto el = geometry::edge_elements(c.constellation, 0);
  c.stations.stations.push_back(station_under(el, 2.5 * T, 0));
  return c;
}

}  // namespace

TEST(Pipeline, NoObservationsNoEnergy) {
  auto cfg = single_node(10.0);
  const auto r = run(cfg, {});
  EXPECT_TRUE(r.observations.empty());
  EXPECT_TRUE(r.slots.empty());
  EXPECT_EQ(r.ledger.total(), 0.0);
  EXPECT_EQ(r.mean_power_w, 0.0);
}

TEST(Pipeline, SingleObservationClosedForm) {
  const double T = 1000.0;
  auto cfg = single_node(T);
  const auto r = run(cfg, {one_observation(5.0)});
  ASSERT_EQ(r.observations.size(), 1u);
  const auto& o = r.observations[0];
  ASSERT_TRUE(o.feasible) << o.failure;
  EXPECT_EQ(o.delivered, cfg.replicas);

  // Clock that fits 2601 images into the slot, cubic power, full slot busy.
  const auto agx = compute::jetson_agx();
  const double n = 2601;
  const double f = n * agx.mu_c * 79.1e9 / (agx.n_cores * agx.flops_per_cycle * (T - n * agx.mu_sync_s));
  const double proc = agx.p_max_w * std::pow(f / agx.f_max_hz, 3) * T;
  const double bits = n * 788513.0 / 2346.0;
  const double rate = oracle::link_budget_db(cfg.link, 617e3).rate_bps;
  const double gather = cfg.link.p_dl_w * bits / rate;
  EXPECT_NEAR(o.mean.joules[kScatterIsl], 0.0, 1e-15);
  EXPECT_NEAR(o.mean.joules[kGatherDl], gather, 1e-3 * gather);
  EXPECT_NEAR(o.mean.joules[kProcessingEdge], proc, 5e-3 * proc);
  EXPECT_NEAR(o.energy_mean, proc + gather, 5e-3 * (proc + gather));
}

TEST(Pipeline, EnergyIsConserved) {
  auto s = scenario::load_scenario(std::string(ORBITEDGE_DATA_DIR) + "/scenarios/worldview3_baseline.yaml");
  s.pipeline.replicas = 20;
  auto cfg = experiments::episode_config(s);
  const auto obs = experiments::episode_observations(s);
  const auto r = run(cfg, obs);
  double by_obs = 0.0, by_slot = 0.0;
  for (const auto& o : r.observations) by_obs += o.mean.total();
  for (const auto& sl : r.slots) by_slot += sl.energy.total();
  EXPECT_NEAR(by_obs, r.ledger.total(), 1e-9 * r.ledger.total());
  EXPECT_NEAR(by_slot, r.ledger.total(), 1e-9 * r.ledger.total());
  EXPECT_NEAR(r.mean_power_w, r.ledger.total_without_maneuver() / cfg.duration_s, 1e-12);
}

TEST(Pipeline, RunsAreReproducible) {
  auto cfg = single_node(10.0);
  cfg.constellation.n_sats_edge = 4;
  cfg.use_ground = true;
  const auto el = geometry::edge_elements(cfg.constellation, 0);
  cfg.stations.stations = {station_under(el, 5.0, 0), station_under(el, 25.0, 1)};
  const std::vector<obs::ScheduledObservation> seq{one_observation(1.0), one_observation(12.0)};
  EXPECT_EQ(observations_csv(run(cfg, seq)), observations_csv(run(cfg, seq)));
  EXPECT_EQ(slots_csv(run(cfg, seq)), slots_csv(run(cfg, seq)));
}

TEST(Pipeline, GroundStationSelection) {
  geometry::ConstellationSpec cs;
  cs.n_sats_edge = 1;
  const auto el = geometry::edge_elements(cs, 0);
  network::LinkSpec link;
  geometry::GroundStationSet gs;
  auto zenith = station_under(el, 100.0, 7);
  auto off = station_under(el, 160.0, 3);
  gs.stations = {off};
  auto one = select_gs(cs, gs, link, 100.0);
  ASSERT_TRUE(one.in_contact());
  EXPECT_EQ(one.station_id, 3);
  gs.stations = {off, zenith};
  auto two = select_gs(cs, gs, link, 100.0);
  EXPECT_EQ(two.station_id, 7);
  EXPECT_NEAR(two.slant_m, 617e3, 1.0);
  EXPECT_GE(two.rate_bps, one.rate_bps);
}

TEST(Pipeline, SampleQuantile) {
  EXPECT_DOUBLE_EQ(sample_quantile({1, 2, 3, 4, 5}, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(sample_quantile({1, 2, 3, 4, 5}, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(sample_quantile({0, 10}, 0.05), 0.5);
}
