#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "orbitedge/acquisition.hpp"
#include "orbitedge/geometry.hpp"
#include "orbitedge/network.hpp"
#include "orbitedge/obs_scheduler.hpp"
#include "orbitedge/proc_scheduler.hpp"

// Slow, independent reference implementations for the test suites. They
// read the library's data types but none of its models.
namespace orbitedge::oracle {

struct OracleCase {
  std::string id;
  double oracle_value = 0.0;
  double system_value = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct OracleReport {
  std::string suite;
  std::vector<OracleCase> cases;

  // Relative error against max(|oracle|, floor).
  const OracleCase& add(const std::string& id, double oracle_value, double system_value, double tolerance,
                        double floor = 1e-12);
  // Pass/fail case without a numeric comparison.
  const OracleCase& add_check(const std::string& id, bool ok);
  bool all_pass() const;
  std::size_t failures() const;
  nlohmann::json to_json() const;
  void write(const std::string& path) const;
};

// ---- observation scheduling --------------------------------------------

double slew_seconds(double alpha_deg);
double slew_seconds(const acquisition::Attitude& a, const acquisition::Attitude& b);

// Every violated constraint of a schedule: window membership, slew timing
// between successors, maneuver energy per satellite, one visit per target,
// and OTWs that are not part of the instance.
std::vector<std::string> check_schedule(const obs::SchedulingInstance& inst, const obs::ObservationSchedule& s);

// Optimal profit by enumeration: per satellite, Held-Karp over (visited
// target set, last OTW) with Pareto (profit, energy) labels, then the best
// split of targets across satellites. Refuses (throws SizeLimitError) above
// 8 targets or 6 OTWs per target.
double enumerate_aeossp(const obs::SchedulingInstance& inst);

// Random small instance: targets with 1..max_otws OTWs each on 1..n_sats
// satellites, attitudes and profits drawn directly.
obs::SchedulingInstance random_small_instance(std::uint64_t seed, int max_targets = 8, int max_otws = 6,
                                              int n_sats = 2);

// ---- processing allocation ----------------------------------------------

struct PschEvaluation {
  bool feasible = false;
  double energy = 0.0;
  double t_delay = 0.0;
  std::vector<std::string> violated;
};

// Energy and constraints of a share vector with every active processor at
// the slowest clock that finishes in the slot.
PschEvaluation evaluate_allocation(const proc::ProcessingInstance& inst, const std::vector<double>& x,
                                   double tolerance = 1e-6);

struct GridResult {
  bool feasible = false;
  double energy = 0.0;
  std::vector<double> x;
  std::size_t points = 0;
};

// Exhaustive simplex grid; at most three processors.
GridResult grid_search_psch(const proc::ProcessingInstance& inst, double step = 0.01);

// ---- links, execution time, visibility ----------------------------------

struct LinkBudget {
  double snr_db = 0.0;
  double spectral_eff = 0.0;
  double rate_bps = 0.0;
};
// Link budget summed in dB with the MODCOD picked by comparing dB thresholds.
LinkBudget link_budget_db(const network::LinkSpec& link, double distance_m);

struct GammaSumStats {
  double mean = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
};
// Empirical quantiles of the sum of n_img i.i.d. Gamma(alpha, theta) draws.
GammaSumStats mc_gamma_sum(double alpha, double theta, int n_img, int replicas, std::uint64_t seed);

struct SweepWindow {
  int sat = 0;
  int target = 0;
  double start = 0.0;
  double end = 0.0;
};
// Visibility by brute-force sampling with its own propagation and an
// off-nadir angle from the central angle.
std::vector<SweepWindow> fine_sweep_visibility(const std::vector<geometry::OrbitalElements>& observers,
                                               const std::vector<geometry::Target>& targets, double t_begin,
                                               double t_end, double max_off_nadir_deg, double step_s = 0.05,
                                               double earth_radius_km = 6371.0);

}  // namespace orbitedge::oracle
