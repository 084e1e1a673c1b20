#include <cmath>

#include <gtest/gtest.h>

#include "orbitedge/compute.hpp"
#include "orbitedge/errors.hpp"
#include "orbitedge/oracle.hpp"

using namespace orbitedge;
using namespace orbitedge::compute;

namespace {

// BSP mean time per image, written out directly.
double bsp(double cores, double flops, double mu_c, double sync, double f, double work = 79.1e9) {
  return work * mu_c / (cores * flops * f) + sync;
}

}  // namespace

TEST(Compute, MaxProcessingSpeeds) {
  const WorkloadSpec w;
  EXPECT_NEAR(1.0 / mean_exec_time(jetson_agx(), 1.3e9, w), 32.45, 0.0325);
  EXPECT_NEAR(mean_exec_time(jetson_agx(), 1.3e9, w), 30.81e-3, 1e-3 * 30.81e-3);
  EXPECT_NEAR(jetson_nano().max_fps(w.work_flops), 17.231, 0.0172);
  EXPECT_NEAR(mean_exec_time(jetson_nano(), 1.02e9, w), 58.03e-3, 1e-3 * 58.03e-3);
  EXPECT_NEAR(satellite_cpu().max_fps(w.work_flops), 5.398, 0.0054);
  EXPECT_NEAR(mean_exec_time(satellite_cpu(), 1.8e9, w), 185.24e-3, 1e-3 * 185.24e-3);
  EXPECT_NEAR(cloud_cpu().max_fps(w.work_flops), 62.377, 0.0624);
  EXPECT_NEAR(mean_exec_time(jetson_agx(), 0.9e9, w), bsp(2048, 2, 1.122, 14.14e-3, 0.9e9), 1e-15);
}

TEST(Compute, FrequencyOutOfRange) {
  const WorkloadSpec w;
  EXPECT_THROW(mean_exec_time(jetson_agx(), 1.4e9, w), DomainError);
  EXPECT_THROW(mean_exec_time(jetson_agx(), 0.0, w), DomainError);
  EXPECT_THROW(power_at(jetson_agx(), 2e9), DomainError);
}

TEST(Compute, PowerAndEnergy) {
  const WorkloadSpec w;
  EXPECT_DOUBLE_EQ(power_at(jetson_agx(), 1.3e9), 60.0);
  EXPECT_NEAR(power_at(jetson_agx(), 0.65e9), 7.5, 1e-12);
  EXPECT_NEAR(energy_per_image(jetson_agx(), 1.3e9, w), 1.849, 0.001);
  EXPECT_NEAR(energy_per_image(satellite_cpu(), 1.8e9, w), 1.111, 0.001);
  EXPECT_LT(energy_per_image(satellite_cpu(), 1e3, w), 1e-9);
}

TEST(Compute, OptimalFrequency) {
  const WorkloadSpec w;
  const auto agx = jetson_agx();
  const double L_sat = 10.0 / mean_exec_time(agx, agx.f_max_hz, w);
  EXPECT_NEAR(optimal_frequency(agx, w, L_sat, 10.0), agx.f_max_hz, 1e-3);
  const double f = optimal_frequency(agx, w, 200.0, 10.0);
  EXPECT_NEAR(mean_exec_time(agx, f, w), 0.05, 1e-12);
  // Inverting the BSP law by hand.
  const double oracle = 79.1e9 * 1.122 / (2048 * 2 * (0.05 - 14.14e-3));
  EXPECT_NEAR(f, oracle, 1.0);
  EXPECT_NEAR(f / 1e9, 0.6042, 5e-4);
  EXPECT_THROW(optimal_frequency(agx, w, 400.0, 10.0), InfeasibleLoadError);
  EXPECT_THROW(optimal_frequency(agx, w, 10.0 / 0.014, 10.0), InfeasibleLoadError);
}

TEST(Compute, FitRecoversGeneratingGamma) {
  Rng rng(42);
  std::vector<ExecSample> samples;
  const double alpha = 60.0, theta = 5e-4;
  for (double f : {0.7e9, 0.9e9, 1.1e9, 1.3e9})
    for (int i = 0; i < 10000; ++i) samples.push_back({f, sample_gamma({alpha, theta}, rng)});
  const auto m = fit_exec_model(samples);
  for (double f : {0.7e9, 1.0e9, 1.3e9}) {
    EXPECT_NEAR(m.alpha(f), alpha, 0.05 * alpha);
    EXPECT_NEAR(m.theta(f), theta, 0.05 * theta);
  }
}

TEST(Compute, FitRejectsBadLogs) {
  std::vector<ExecSample> flat;
  for (double f : {0.7e9, 0.9e9, 1.1e9, 1.3e9})
    for (int i = 0; i < 50; ++i) flat.push_back({f, 0.03});
  EXPECT_THROW(fit_exec_model(flat), FitError);
  std::vector<ExecSample> few{{1e9, 0.03}, {1e9, 0.031}};
  EXPECT_THROW(fit_exec_model(few), FitError);
}

TEST(Compute, SyntheticModelTracksBsp) {
  const WorkloadSpec w;
  const auto agx = jetson_agx();
  const auto m = default_exec_model(agx, w);
  for (double f = m.f_lo_hz; f <= m.f_hi_hz; f += (m.f_hi_hz - m.f_lo_hz) / 10) {
    const double mu = mean_exec_time(agx, f, w);
    EXPECT_NEAR(m.alpha(f) * m.theta(f), mu, 0.05 * mu) << f;
  }
}

TEST(Compute, BatchDistribution) {
  const GammaParams g{50.0, 6e-4};
  const auto one = batch_exec_distribution(g, 1);
  EXPECT_DOUBLE_EQ(one.gamma.shape, g.shape);
  EXPECT_DOUBLE_EQ(one.gamma.scale, g.scale);
  const auto b = batch_exec_distribution(g, 2601);
  EXPECT_NEAR(b.mean(), 2601 * g.mean(), 1e-9);
  const auto mc = oracle::mc_gamma_sum(g.shape, g.scale, 2601, 10000, 3);
  EXPECT_NEAR(b.quantile(0.05), mc.q05, 2e-3 * mc.q05);
  EXPECT_NEAR(b.quantile(0.95), mc.q95, 2e-3 * mc.q95);
  EXPECT_NEAR(b.mean(), mc.mean, 1e-3 * mc.mean);
}

TEST(Compute, SingleImageQuantilesMatchMonteCarlo) {
  const GammaParams g{3.0, 0.01};
  const auto b = batch_exec_distribution(g, 1);
  const auto mc = oracle::mc_gamma_sum(g.shape, g.scale, 1, 100000, 8);
  EXPECT_NEAR(b.quantile(0.05), mc.q05, 0.03 * mc.q05);
  EXPECT_NEAR(b.quantile(0.95), mc.q95, 0.02 * mc.q95);
}

TEST(Compute, PlatformLookup) {
  EXPECT_EQ(platform_by_name("agx").id, "jetson_agx");
  EXPECT_EQ(platform_by_name("nano").id, "jetson_nano");
  EXPECT_THROW(platform_by_name("tpu"), ConfigError);
}
