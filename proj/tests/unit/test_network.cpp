#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "orbitedge/errors.hpp"
#include "orbitedge/geometry.hpp"
#include "orbitedge/network.hpp"
#include "orbitedge/oracle.hpp"

using namespace orbitedge;
using namespace orbitedge::network;

namespace {
constexpr double c = 299792458.0;
double db(double x) { return 10.0 * std::log10(x); }
}  // namespace

TEST(Network, ZenithSnrMatchesDbBudget) {
  LinkSpec link;
  EXPECT_NEAR(fspl_db(617e3, 20e9), 174.28, 0.01);
  const double snr_db = db(downlink_snr(link, 617e3));
  EXPECT_NEAR(snr_db, 10.0 + 66.33 - 174.28 + 119.32, 0.02);
  EXPECT_NEAR(snr_db, oracle::link_budget_db(link, 617e3).snr_db, 1e-9);
}

TEST(Network, RateAgreesWithDbOracleAlongRange) {
  LinkSpec link;
  for (double d = 617e3; d < 3000e3; d += 97e3) {
    const auto ref = oracle::link_budget_db(link, d);
    EXPECT_DOUBLE_EQ(downlink_rate(link, downlink_snr(link, d)), ref.rate_bps) << d;
  }
}

TEST(Network, RateFloorAndCeiling) {
  LinkSpec link;
  EXPECT_EQ(downlink_rate(link, 0.0), 0.0);
  EXPECT_EQ(downlink_rate(link, std::pow(10.0, -3.0 / 10)), 0.0);
  EXPECT_DOUBLE_EQ(downlink_rate(link, std::numeric_limits<double>::infinity()),
                   link.bandwidth_hz * link.modcods.back().spectral_eff);
  // 64APSK 7/9 at 4.6 b/s/Hz: the edge-of-coverage operating point.
  EXPECT_NEAR(downlink_rate(link, std::pow(10.0, 16.0 / 10)), 2.3e9, 1e6);
}

TEST(Network, ShannonMode) {
  LinkSpec link;
  link.mode = ThresholdMode::kShannon;
  link.margin_db = 1.0;
  for (const auto& m : link.modcods)
    EXPECT_NEAR(db(link.threshold(m)), db(std::pow(2.0, m.spectral_eff) - 1.0) + 1.0, 1e-9);
}

TEST(Network, ModcodCsvMatchesBuiltIn) {
  const auto table = load_modcod_csv(std::string(ORBITEDGE_DATA_DIR) + "/dvbs2x_modcod.csv");
  const auto builtin = dvbs2x_table();
  ASSERT_EQ(table.size(), builtin.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    EXPECT_NEAR(table[i].spectral_eff, builtin[i].spectral_eff, 1e-6);
    EXPECT_NEAR(table[i].esn0_db, builtin[i].esn0_db, 1e-9);
  }
  EXPECT_THROW(load_modcod_csv("/nonexistent/modcod.csv"), ConfigError);
}

TEST(Network, RingRoutes) {
  EXPECT_EQ(shortest_route(23, 4, 4).isl_hops(), 0);
  EXPECT_EQ(shortest_route(23, 0, 11).isl_hops(), 11);
  EXPECT_EQ(shortest_route(23, 0, 12).isl_hops(), 11);
  const auto r = shortest_route(23, 1, 21);
  EXPECT_EQ(r.nodes, (std::vector<int>{1, 0, 22, 21}));
  // Even ring tie goes forward.
  EXPECT_EQ(shortest_route(4, 0, 2).nodes, (std::vector<int>{0, 1, 2}));
  EXPECT_THROW(route_to_ground(23, 0, std::nullopt), NoRouteError);
  EXPECT_TRUE(route_to_ground(23, 0, 5).to_ground);
}

TEST(Network, PropagationBound) {
  const double d = geometry::isl_slant_range(23, 617.0) * 1e3;
  const double t_prop = d / c;
  EXPECT_NEAR(t_prop, 6.348e-3, 1e-5);
  EXPECT_NEAR(11 * t_prop, 69.8e-3, 0.1e-3);
}

TEST(Network, Latencies) {
  LinkSpec link;
  const double d = geometry::isl_slant_range(23, 617.0) * 1e3;
  EXPECT_EQ(comm_latency_uncompressed(shortest_route(23, 3, 3), 788513.0, link, d), 0.0);
  const double one = comm_latency_uncompressed(shortest_route(23, 0, 1), 788513.0, link, d);
  EXPECT_NEAR(one, 788513.0 / 10e9 + d / c, 1e-15);
  EXPECT_NEAR(one, 6.42e-3, 0.01e-3);

  auto r = route_to_ground(23, 0, 2);
  const double deg = 1200e3;
  const double got = comm_latency_compressed(r, 788513.0, 2346.0, link, d, 2.3e9, deg);
  const double bits = 788513.0 / 2346.0;
  EXPECT_NEAR(got, 2 * (bits / 10e9 + d / c) + bits / 2.3e9 + deg / c, 1e-15);
  EXPECT_NEAR(bits / 2.3e9, 0.146e-6, 0.001e-6);
  const double huge = comm_latency_compressed(r, 788513.0, 1e15, link, d, 2.3e9, deg);
  EXPECT_NEAR(huge, 2 * d / c + deg / c, 1e-12);
  EXPECT_THROW(comm_latency_compressed(r, 788513.0, 2346.0, link, d, 0.0, deg), NoContactError);
}

TEST(Network, TransmitEnergy) {
  LinkSpec link;
  EXPECT_EQ(isl_tx_energy(0.0, link), 0.0);
  EXPECT_NEAR(isl_tx_energy(788513.0, link), 4.731e-3, 1e-6);
  EXPECT_NEAR(dl_tx_energy(336.0, 2.3e9, link), 1.461e-6, 1e-9);
  EXPECT_THROW(dl_tx_energy(336.0, 0.0, link), NoContactError);
}
