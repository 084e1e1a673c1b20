#pragma once

#include <optional>
#include <string>
#include <vector>

// Optical inter-satellite links at a fixed rate, an adaptive-rate RF feeder
// link, and shortest-path routing around a single ring.
namespace orbitedge::network {

struct Modcod {
  std::string name;
  double spectral_eff = 0.0;  // b/s/Hz
  double esn0_db = 0.0;       // required Es/N0 in AWGN
  double gamma_min() const;   // linear
};

// DVB-S2 and DVB-S2X normal-frame operating points, sorted by efficiency.
std::vector<Modcod> dvbs2x_table();
// CSV with columns name,spectral_eff,esn0_db (a header line is skipped).
std::vector<Modcod> load_modcod_csv(const std::string& path);

enum class ThresholdMode {
  kTable,    // thresholds from the MODCOD table
  kShannon,  // 2^r - 1 plus margin_db
};

struct LinkSpec {
  double r_isl_bps = 10e9;
  double p_isl_w = 60.0;
  double bandwidth_hz = 500e6;
  double p_dl_w = 10.0;
  double g_dl_db = 66.33;
  double noise_dbw = -119.32;
  double fc_hz = 20e9;
  std::vector<Modcod> modcods = dvbs2x_table();
  ThresholdMode mode = ThresholdMode::kTable;
  double margin_db = 0.0;

  // Sorts the table and checks it; throws ConfigError.
  void validate();
  double threshold(const Modcod& m) const;  // linear SNR needed for m
};

double fspl_db(double distance_m, double fc_hz);
double downlink_snr(const LinkSpec& link, double distance_m);
// Best efficiency whose threshold the SNR clears; 0 when none does.
double spectral_efficiency(const LinkSpec& link, double gamma);
double downlink_rate(const LinkSpec& link, double gamma);

enum class Phase { kUncompressed, kCompressed };

struct Route {
  std::vector<int> nodes;  // ring indices visited, source first
  bool to_ground = false;  // ends with a feeder-link hop from nodes.back()
  Phase phase = Phase::kUncompressed;
  int slot = 0;
  int isl_hops() const { return nodes.empty() ? 0 : static_cast<int>(nodes.size()) - 1; }
};

int ring_distance(int n, int a, int b);
// Min-hop arc; ties (even rings) go in the increasing direction.
Route shortest_route(int n, int src, int dst);
// Route to the ground through `downlink_sat`; NoRouteError when nullopt.
Route route_to_ground(int n, int src, std::optional<int> downlink_sat);

double comm_latency_uncompressed(const Route& r, double bits, const LinkSpec& link, double d_isl_m);
double comm_latency_compressed(const Route& r, double bits, double rho, const LinkSpec& link,
                               double d_isl_m, double rate_k_bps, double d_eg_m);

double isl_tx_energy(double bits, const LinkSpec& link);
double dl_tx_energy(double bits, double rate_bps, const LinkSpec& link);

}  // namespace orbitedge::network
