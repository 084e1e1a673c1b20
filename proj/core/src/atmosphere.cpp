#include "orbitedge/atmosphere.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "orbitedge/errors.hpp"

namespace orbitedge::atmosphere {

EmpiricalCdf::EmpiricalCdf(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
  if (knots_.empty()) throw ConfigError("empirical CDF has no knots");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    const auto [v, p] = knots_[i];
    if (!(v >= 0.0) || !(p >= 0.0 && p <= 1.0))
      throw ConfigError("empirical CDF knot " + std::to_string(i) + " out of range");
    if (i > 0 && (v < knots_[i - 1].first || p < knots_[i - 1].second))
      throw ConfigError("empirical CDF must be non-decreasing (knot " + std::to_string(i) + ")");
  }
  if (std::abs(knots_.back().second - 1.0) > 1e-9)
    throw ConfigError("empirical CDF must reach probability 1");
}

EmpiricalCdf EmpiricalCdf::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open turbulence CDF file: " + path);
  std::vector<std::pair<double, double>> knots;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double v = 0.0, p = 0.0;
    if (!(ss >> v >> p)) {
      if (lineno == 1) continue;  // header
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'value,probability'");
    }
    knots.emplace_back(v, p);
  }
  return EmpiricalCdf(std::move(knots));
}

double EmpiricalCdf::cdf(double value) const {
  if (value < knots_.front().first) return 0.0;
  if (value >= knots_.back().first) return 1.0;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), value,
                             [](double v, const auto& k) { return v < k.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  if (hi.first == lo.first) return hi.second;
  return lo.second + (hi.second - lo.second) * (value - lo.first) / (hi.first - lo.first);
}

double EmpiricalCdf::quantile(double u) const {
  if (u <= knots_.front().second) return knots_.front().first;
  auto it = std::lower_bound(knots_.begin(), knots_.end(), u,
                             [](const auto& k, double p) { return k.second < p; });
  if (it == knots_.end()) return knots_.back().first;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  if (hi.second == lo.second) return hi.first;
  return lo.first + (hi.first - lo.first) * (u - lo.second) / (hi.second - lo.second);
}

double EmpiricalCdf::mean() const {
  // Atom at the first knot plus uniform mass on each segment.
  double m = knots_.front().first * knots_.front().second;
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    const double dp = knots_[i].second - knots_[i - 1].second;
    m += dp * 0.5 * (knots_[i].first + knots_[i - 1].first);
  }
  return m;
}

void TurbulenceModel::validate() const {
  if (!(threshold >= 0.0)) throw ConfigError("turbulence threshold must be non-negative");
  if (kind == Kind::kEmpirical) {
    if (empirical.empty()) throw ConfigError("empirical turbulence CDF not loaded");
  } else {
    if (!(lognormal.median > 0.0)) throw ConfigError("lognormal median must be positive");
    if (!(lognormal.log_sigma >= 0.0)) throw ConfigError("lognormal log-sigma must be >= 0");
  }
}

double TurbulenceModel::cdf(double value) const {
  if (kind == Kind::kEmpirical) {
    if (empirical.empty()) throw ConfigError("empirical turbulence CDF not loaded");
    return empirical.cdf(value);
  }
  if (value <= 0.0) return 0.0;
  if (lognormal.log_sigma == 0.0) return value >= lognormal.median ? 1.0 : 0.0;
  const boost::math::normal_distribution<double> n(0.0, 1.0);
  return boost::math::cdf(n, std::log(value / lognormal.median) / lognormal.log_sigma);
}

double TurbulenceModel::quantile(double u) const {
  if (kind == Kind::kEmpirical) {
    if (empirical.empty()) throw ConfigError("empirical turbulence CDF not loaded");
    return empirical.quantile(u);
  }
  if (lognormal.log_sigma == 0.0) return lognormal.median;
  const boost::math::normal_distribution<double> n(0.0, 1.0);
  const double uu = std::clamp(u, 1e-300, 1.0 - 1e-16);
  return lognormal.median * std::exp(lognormal.log_sigma * boost::math::quantile(n, uu));
}

double lognormal_sigma_for(double median, double value, double probability) {
  const boost::math::normal_distribution<double> n(0.0, 1.0);
  return std::log(value / median) / boost::math::quantile(n, probability);
}

Cn2Sampler::Cn2Sampler(TurbulenceModel model, std::uint64_t seed)
    : model_(std::move(model)), rng_(seed) {
  model_.validate();
}

double Cn2Sampler::draw() { return model_.quantile(uniform01(rng_)); }

std::vector<double> Cn2Sampler::sample(std::size_t draws) {
  std::vector<double> out(draws);
  for (auto& v : out) v = draw();
  return out;
}

std::vector<double> sample_cn2(const TurbulenceModel& model, std::size_t draws, std::uint64_t seed) {
  if (draws < 1) throw DomainError("sample_cn2 needs at least one draw");
  Cn2Sampler s(model, seed);
  return s.sample(draws);
}

bool gate_observation(const TurbulenceModel& model, double cn2) { return cn2 <= model.threshold; }

}  // namespace orbitedge::atmosphere
