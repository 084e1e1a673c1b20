#include <algorithm>
#include <cmath>
#include <random>

#include "orbitedge/errors.hpp"
#include "orbitedge/oracle.hpp"

namespace orbitedge::oracle {

namespace {

constexpr double kLight = 299'792'458.0;
constexpr double kMu = 3.986004418e14;
constexpr double kSpin = 7.2921159e-5;
constexpr double kDeg = 3.14159265358979323846 / 180.0;

double quantile7(const std::vector<double>& sorted, double q) {
  const double h = (sorted.size() - 1) * q;
  const auto i = static_cast<std::size_t>(std::floor(h));
  const auto j = std::min(i + 1, sorted.size() - 1);
  return sorted[i] + (h - i) * (sorted[j] - sorted[i]);
}

struct P3 {
  double x, y, z;
};

P3 sat_ecef(const geometry::OrbitalElements& el, double t, double re) {
  const double r = re + el.altitude_km;
  const double n = std::sqrt(kMu / std::pow(r * 1e3, 3));
  const double u = el.phase_deg * kDeg + n * t;
  const double O = el.raan_deg * kDeg, i = el.inclination_deg * kDeg;
  const double x = r * (std::cos(O) * std::cos(u) - std::sin(O) * std::sin(u) * std::cos(i));
  const double y = r * (std::sin(O) * std::cos(u) + std::cos(O) * std::sin(u) * std::cos(i));
  const double z = r * std::sin(u) * std::sin(i);
  const double a = kSpin * t;
  return {x * std::cos(a) + y * std::sin(a), -x * std::sin(a) + y * std::cos(a), z};
}

}  // namespace

LinkBudget link_budget_db(const network::LinkSpec& link, double d) {
  LinkBudget b;
  const double fspl = 20.0 * std::log10(4.0 * 3.14159265358979323846 * d * link.fc_hz / kLight);
  b.snr_db = 10.0 * std::log10(link.p_dl_w) + link.g_dl_db - fspl - link.noise_dbw;
  for (const auto& m : link.modcods) {
    const double need = link.mode == network::ThresholdMode::kTable
                            ? m.esn0_db + link.margin_db
                            : 10.0 * std::log10(std::pow(2.0, m.spectral_eff) - 1.0) + link.margin_db;
    if (need <= b.snr_db + 1e-12) b.spectral_eff = std::max(b.spectral_eff, m.spectral_eff);
  }
  b.rate_bps = b.spectral_eff * link.bandwidth_hz;
  return b;
}

GammaSumStats mc_gamma_sum(double alpha, double theta, int n_img, int replicas, std::uint64_t seed) {
  if (replicas < 1 || n_img < 1) throw DomainError("need at least one replica and one image");
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> g(alpha, theta);
  std::vector<double> sums(static_cast<std::size_t>(replicas));
  double total = 0.0;
  for (auto& s : sums) {
    double acc = 0.0;
    for (int k = 0; k < n_img; ++k) acc += g(rng);
    s = acc;
    total += acc;
  }
  std::sort(sums.begin(), sums.end());
  return {total / replicas, quantile7(sums, 0.05), quantile7(sums, 0.95)};
}

std::vector<SweepWindow> fine_sweep_visibility(const std::vector<geometry::OrbitalElements>& observers,
                                               const std::vector<geometry::Target>& targets, double t_begin,
                                               double t_end, double max_off_nadir_deg, double step_s,
                                               double re) {
  std::vector<SweepWindow> out;
  for (std::size_t s = 0; s < observers.size(); ++s) {
    const double r = re + observers[s].altitude_km;
    for (const auto& tg : targets) {
      const double la = tg.lat_deg * kDeg, lo = tg.lon_deg * kDeg;
      const P3 g{std::cos(la) * std::cos(lo), std::cos(la) * std::sin(lo), std::sin(la)};
      auto visible = [&](double t) {
        const P3 p = sat_ecef(observers[s], t, re);
        const double c = (p.x * g.x + p.y * g.y + p.z * g.z) / r;  // cos of the central angle
        if (r * c <= re) return false;  // at or below the horizon
        const double sin_c = std::sqrt(std::max(0.0, 1.0 - c * c));
        const double d = std::sqrt(re * re + r * r - 2.0 * re * r * c);
        return std::asin(re * sin_c / d) <= max_off_nadir_deg * kDeg;
      };
      auto edge = [&](double out_t, double in_t) {
        for (int it = 0; it < 40; ++it) {
          const double m = 0.5 * (out_t + in_t);
          (visible(m) ? in_t : out_t) = m;
        }
        return in_t;
      };
      bool in = false;
      double start = 0.0, prev = t_begin;
      const auto n = static_cast<long>(std::floor((t_end - t_begin) / step_s));
      for (long k = 0; k <= n + 1; ++k) {
        const double t = std::min(t_begin + k * step_s, t_end);
        const bool v = visible(t);
        if (v && !in) start = k == 0 ? t : edge(prev, t);
        if (!v && in) out.push_back({static_cast<int>(s), tg.id, start, edge(t, prev)});
        in = v;
        prev = t;
        if (t >= t_end) break;
      }
      if (in) out.push_back({static_cast<int>(s), tg.id, start, t_end});
    }
  }
  std::sort(out.begin(), out.end(), [](const SweepWindow& a, const SweepWindow& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.sat != b.sat) return a.sat < b.sat;
    return a.target < b.target;
  });
  return out;
}

}  // namespace orbitedge::oracle
