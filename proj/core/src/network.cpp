#include "orbitedge/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "orbitedge/constants.hpp"
#include "orbitedge/errors.hpp"

namespace orbitedge::network {

namespace {

double from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

double Modcod::gamma_min() const { return from_db(esn0_db); }

std::vector<Modcod> dvbs2x_table() {
  std::vector<Modcod> t = {
      {"QPSK 1/4", 0.490243, -2.35},      {"QPSK 13/45", 0.565750, -2.03},
      {"QPSK 1/3", 0.656448, -1.24},      {"QPSK 2/5", 0.789412, -0.30},
      {"QPSK 9/20", 0.881364, 0.22},      {"QPSK 1/2", 0.988858, 1.00},
      {"QPSK 11/20", 1.077559, 1.45},     {"QPSK 3/5", 1.188304, 2.23},
      {"QPSK 2/3", 1.322253, 3.10},       {"QPSK 3/4", 1.487473, 4.03},
      {"QPSK 4/5", 1.587196, 4.68},       {"QPSK 5/6", 1.654663, 5.18},
      {"8APSK 5/9-L", 1.638994, 4.73},    {"8APSK 26/45-L", 1.704789, 5.13},
      {"QPSK 8/9", 1.766451, 6.20},       {"8PSK 3/5", 1.779991, 5.50},
      {"QPSK 9/10", 1.788612, 6.42},      {"8PSK 23/36", 1.888388, 6.12},
      {"16APSK 1/2-L", 1.960603, 5.97},   {"8PSK 2/3", 1.980636, 6.62},
      {"8PSK 25/36", 2.053156, 7.02},     {"16APSK 8/15-L", 2.091372, 6.55},
      {"8PSK 13/18", 2.135498, 7.49},     {"16APSK 5/9-L", 2.178341, 6.84},
      {"8PSK 3/4", 2.228124, 7.91},       {"16APSK 26/45", 2.265480, 7.51},
      {"16APSK 3/5", 2.348302, 7.80},     {"16APSK 3/5-L", 2.352445, 7.41},
      {"16APSK 28/45", 2.435437, 8.10},   {"8PSK 5/6", 2.478562, 9.35},
      {"16APSK 23/36", 2.501131, 8.38},   {"16APSK 2/3-L", 2.613080, 8.43},
      {"16APSK 2/3", 2.637201, 8.97},     {"8PSK 8/9", 2.646012, 10.69},
      {"8PSK 9/10", 2.679207, 10.98},     {"16APSK 25/36", 2.717260, 9.27},
      {"16APSK 13/18", 2.831163, 9.71},   {"16APSK 3/4", 2.966728, 10.21},
      {"16APSK 7/9", 3.046627, 10.65},    {"16APSK 4/5", 3.165623, 11.03},
      {"32APSK 2/3-L", 3.261362, 11.10},  {"16APSK 5/6", 3.300184, 11.61},
      {"16APSK 77/90", 3.345004, 11.99},  {"16APSK 8/9", 3.523143, 12.89},
      {"32APSK 32/45", 3.529071, 11.75},  {"16APSK 9/10", 3.567342, 13.13},
      {"32APSK 11/15", 3.641434, 12.17},  {"32APSK 3/4", 3.703295, 12.73},
      {"32APSK 7/9", 3.863163, 13.05},    {"32APSK 4/5", 3.951571, 13.64},
      {"32APSK 5/6", 4.119540, 14.28},    {"64APSK 32/45-L", 4.215603, 13.64},
      {"64APSK 11/15", 4.340955, 14.50},  {"32APSK 8/9", 4.397854, 15.69},
      {"32APSK 9/10", 4.453027, 16.05},   {"64APSK 7/9", 4.600206, 15.87},
      {"64APSK 4/5", 4.738553, 16.21},    {"64APSK 5/6", 4.939970, 16.95},
      {"256APSK 29/45-L", 5.116763, 16.98}, {"128APSK 3/4", 5.151932, 17.73},
      {"256APSK 2/3-L", 5.304474, 17.24}, {"128APSK 7/9", 5.345417, 18.53},
      {"256APSK 31/45-L", 5.484604, 18.10}, {"256APSK 32/45", 5.671260, 18.59},
      {"256APSK 11/15-L", 5.700554, 18.84}, {"256APSK 3/4", 5.904263, 19.57},
  };
  std::stable_sort(t.begin(), t.end(),
                   [](const Modcod& a, const Modcod& b) { return a.spectral_eff < b.spectral_eff; });
  return t;
}

std::vector<Modcod> load_modcod_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open MODCOD table '" + path + "'");
  std::vector<Modcod> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    try {
      if (cols.size() != 3) throw std::invalid_argument("columns");
      out.push_back({cols[0], std::stod(cols[1]), std::stod(cols[2])});
    } catch (const std::exception&) {
      if (lineno == 1) continue;  // header
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected name,spectral_eff,esn0_db");
    }
  }
  if (out.empty()) throw ConfigError("MODCOD table '" + path + "' is empty");
  return out;
}

void LinkSpec::validate() {
  std::vector<std::string> problems;
  if (!(r_isl_bps > 0)) problems.push_back("ISL rate must be positive");
  if (!(p_isl_w >= 0)) problems.push_back("ISL power must be non-negative");
  if (!(bandwidth_hz > 0)) problems.push_back("downlink bandwidth must be positive");
  if (!(p_dl_w > 0)) problems.push_back("downlink power must be positive");
  if (!(fc_hz > 0)) problems.push_back("carrier frequency must be positive");
  if (modcods.empty()) problems.push_back("MODCOD table is empty");
  std::stable_sort(modcods.begin(), modcods.end(),
                   [](const Modcod& a, const Modcod& b) { return a.spectral_eff < b.spectral_eff; });
  for (const auto& m : modcods) {
    if (!(m.spectral_eff > 0)) problems.push_back(m.name + ": non-positive efficiency");
    // Capacity bound: no MODCOD can beat Shannon.
    if (threshold(m) < std::pow(2.0, m.spectral_eff) - 1.0 - 1e-12)
      problems.push_back(m.name + ": threshold below the Shannon bound");
  }
  if (!problems.empty()) throw ValidationError(problems);
}

double LinkSpec::threshold(const Modcod& m) const {
  if (mode == ThresholdMode::kShannon) return (std::pow(2.0, m.spectral_eff) - 1.0) * from_db(margin_db);
  return m.gamma_min() * from_db(margin_db);
}

double fspl_db(double d, double fc) { return 20.0 * std::log10(4.0 * kPi * d * fc / kSpeedOfLight); }

double downlink_snr(const LinkSpec& link, double d) {
  if (!(d > 0)) throw DomainError("distance must be positive");
  const double sigma = std::sqrt(from_db(link.noise_dbw));
  const double a = kSpeedOfLight / (4.0 * kPi * d * link.fc_hz * sigma);
  return from_db(link.g_dl_db) * link.p_dl_w * a * a;
}

double spectral_efficiency(const LinkSpec& link, double gamma) {
  if (!(gamma >= 0)) throw DomainError("SNR must be non-negative");
  double best = 0.0;
  for (const auto& m : link.modcods)
    if (gamma >= link.threshold(m)) best = std::max(best, m.spectral_eff);
  return best;
}

double downlink_rate(const LinkSpec& link, double gamma) {
  return link.bandwidth_hz * spectral_efficiency(link, gamma);
}

int ring_distance(int n, int a, int b) {
  if (n < 1 || a < 0 || b < 0 || a >= n || b >= n) throw DomainError("ring index out of range");
  const int d = ((b - a) % n + n) % n;
  return std::min(d, n - d);
}

Route shortest_route(int n, int src, int dst) {
  const int hops = ring_distance(n, src, dst);
  const int fwd = ((dst - src) % n + n) % n;
  const int step = fwd == hops ? 1 : -1;
  Route r;
  for (int k = 0, v = src; k <= hops; ++k, v = ((v + step) % n + n) % n) r.nodes.push_back(v);
  return r;
}

Route route_to_ground(int n, int src, std::optional<int> downlink_sat) {
  if (!downlink_sat) throw NoRouteError("no edge satellite in contact with a ground station");
  Route r = shortest_route(n, src, *downlink_sat);
  r.to_ground = true;
  return r;
}

double comm_latency_uncompressed(const Route& r, double bits, const LinkSpec& link, double d_isl_m) {
  if (!(bits > 0)) throw DomainError("data size must be positive");
  return r.isl_hops() * (bits / link.r_isl_bps + d_isl_m / kSpeedOfLight);
}

double comm_latency_compressed(const Route& r, double bits, double rho, const LinkSpec& link, double d_isl_m,
                               double rate_k, double d_eg_m) {
  if (!(rho >= 1.0)) throw DomainError("compression ratio must be >= 1");
  if (!(rate_k > 0)) throw NoContactError("downlink rate is zero");
  const double d = bits / rho;
  return r.isl_hops() * (d / link.r_isl_bps + d_isl_m / kSpeedOfLight) + d / rate_k + d_eg_m / kSpeedOfLight;
}

double isl_tx_energy(double bits, const LinkSpec& link) {
  if (!(bits >= 0)) throw DomainError("data size must be non-negative");
  return link.p_isl_w * bits / link.r_isl_bps;
}

double dl_tx_energy(double bits, double rate, const LinkSpec& link) {
  if (!(bits >= 0)) throw DomainError("data size must be non-negative");
  if (!(rate > 0)) throw NoContactError("downlink rate is zero");
  return link.p_dl_w * bits / rate;
}

}  // namespace orbitedge::network
