#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "orbitedge/rng.hpp"

// Ground-level turbulence strength C_n^2(0) in m^(-2/3) and the quality gate
// applied to each executed acquisition.
namespace orbitedge::atmosphere {

// Monotone piecewise-linear CDF given as (value, cumulative probability)
// knots. The first knot's probability may be > 0 (atom at the lowest value).
class EmpiricalCdf {
 public:
  EmpiricalCdf() = default;
  explicit EmpiricalCdf(std::vector<std::pair<double, double>> knots);

  static EmpiricalCdf load_csv(const std::string& path);

  bool empty() const { return knots_.empty(); }
  double cdf(double value) const;
  double quantile(double u) const;
  // Exact mean of the piecewise-linear distribution.
  double mean() const;
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

 private:
  std::vector<std::pair<double, double>> knots_;
};

struct Lognormal {
  double median = 1.1e-14;
  double log_sigma = 1.5515;
};

struct TurbulenceModel {
  enum class Kind { kLognormal, kEmpirical };
  Kind kind = Kind::kLognormal;
  Lognormal lognormal;
  EmpiricalCdf empirical;
  double threshold = 2e-14;  // C_n,max^2(0)

  void validate() const;
  double cdf(double value) const;
  double quantile(double u) const;
};

// Log-std that places `probability` of the mass below `value` for a given median.
double lognormal_sigma_for(double median, double value, double probability);

// Seeded inverse-CDF sampler; one instance per simulation replica.
class Cn2Sampler {
 public:
  Cn2Sampler(TurbulenceModel model, std::uint64_t seed);
  double draw();
  std::vector<double> sample(std::size_t draws);
  const TurbulenceModel& model() const { return model_; }

 private:
  TurbulenceModel model_;
  Rng rng_;
};

std::vector<double> sample_cn2(const TurbulenceModel& model, std::size_t draws, std::uint64_t seed);

bool gate_observation(const TurbulenceModel& model, double cn2);

}  // namespace orbitedge::atmosphere
