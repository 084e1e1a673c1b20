#include <cmath>
#include <limits>
#include <numeric>

#include <gtest/gtest.h>

#include "orbitedge/atmosphere.hpp"
#include "orbitedge/errors.hpp"

using namespace orbitedge;
using namespace orbitedge::atmosphere;

namespace {

TurbulenceModel empirical_model() {
  TurbulenceModel m;
  m.kind = TurbulenceModel::Kind::kEmpirical;
  m.empirical = EmpiricalCdf({{2e-15, 0.1}, {1e-14, 0.45}, {2e-14, 0.7}, {6e-14, 0.95}, {1.5e-13, 1.0}});
  return m;
}

// Mean as v0 + integral of the survival function, with its own interpolation.
double survival_integral(const std::vector<std::pair<double, double>>& k) {
  auto F = [&](double v) {
    if (v < k.front().first) return 0.0;
    for (std::size_t i = 1; i < k.size(); ++i)
      if (v <= k[i].first) {
        const double w = (v - k[i - 1].first) / (k[i].first - k[i - 1].first);
        return k[i - 1].second + w * (k[i].second - k[i - 1].second);
      }
    return 1.0;
  };
  const int n = 200000;
  const double a = k.front().first, b = k.back().first, h = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += 1.0 - F(a + (i + 0.5) * h);
  return a + s * h;
}

}  // namespace

TEST(Atmosphere, GateAtThreshold) {
  TurbulenceModel m;
  m.threshold = 2e-14;
  EXPECT_TRUE(gate_observation(m, 1e-14));
  EXPECT_FALSE(gate_observation(m, 3e-14));
}

TEST(Atmosphere, PointMassSamplesAreConstant) {
  TurbulenceModel m;
  m.kind = TurbulenceModel::Kind::kEmpirical;
  m.empirical = EmpiricalCdf({{1e-14, 1.0}});
  for (double v : sample_cn2(m, 1000, 3)) EXPECT_EQ(v, 1e-14);
}

TEST(Atmosphere, EmpiricalMeanMatchesIntegral) {
  const auto m = empirical_model();
  const auto s = sample_cn2(m, 100000, 11);
  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / s.size();
  double var = 0.0;
  for (double v : s) var += (v - mean) * (v - mean);
  var /= (s.size() - 1);
  const double oracle = survival_integral(m.empirical.knots());
  EXPECT_NEAR(mean, oracle, 3.0 * std::sqrt(var / s.size()));
  EXPECT_NEAR(m.empirical.mean(), oracle, 1e-3 * oracle);
}

TEST(Atmosphere, AcceptanceRateMatchesCdf) {
  TurbulenceModel m;
  const auto s = sample_cn2(m, 100000, 5);
  std::size_t ok = 0;
  for (double v : s) ok += gate_observation(m, v);
  const double p = m.cdf(m.threshold);
  EXPECT_NEAR(static_cast<double>(ok) / s.size(), p, 3.0 * std::sqrt(p * (1 - p) / s.size()));
  // Default calibration: about two thirds of acquisitions pass.
  EXPECT_NEAR(p, 0.65, 0.005);
}

TEST(Atmosphere, SamplingIsDeterministic) {
  TurbulenceModel m;
  EXPECT_EQ(sample_cn2(m, 500, 99), sample_cn2(m, 500, 99));
  EXPECT_NE(sample_cn2(m, 500, 99), sample_cn2(m, 500, 100));
}

TEST(Atmosphere, LognormalQuantileInvertsCdf) {
  TurbulenceModel m;
  for (double u : {0.01, 0.3, 0.5, 0.9, 0.999}) EXPECT_NEAR(m.cdf(m.quantile(u)), u, 1e-9);
  EXPECT_NEAR(m.quantile(0.5), m.lognormal.median, 1e-20);
  const double s = lognormal_sigma_for(1.1e-14, 2e-14, 0.65);
  m.lognormal.log_sigma = s;
  EXPECT_NEAR(m.cdf(2e-14), 0.65, 1e-9);
}

TEST(Atmosphere, UnloadedEmpiricalIsAnError) {
  TurbulenceModel m;
  m.kind = TurbulenceModel::Kind::kEmpirical;
  EXPECT_THROW(m.validate(), ConfigError);
  EXPECT_THROW(sample_cn2(m, 10, 1), ConfigError);
  EXPECT_THROW(EmpiricalCdf({{1e-14, 0.2}, {2e-14, 0.1}}), ConfigError);
}
