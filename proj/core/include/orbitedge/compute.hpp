#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "orbitedge/rng.hpp"

// Processor catalog plus the execution-time and power models used to price
// onboard and ground inference.
namespace orbitedge::compute {

enum class NodeKind { kSatellite, kGround };

struct PlatformSpec {
  std::string id;
  int n_cores = 1;
  double f_max_hz = 1e9;
  double p_max_w = 1.0;
  double flops_per_cycle = 1.0;
  double mu_c = 1.0;       // parallel inefficiency factor
  double mu_sync_s = 0.0;  // per-image synchronization overhead
  NodeKind kind = NodeKind::kSatellite;

  void validate() const;
  // Images per second at f_max.
  double max_fps(double work_flops) const;
};

// Built-in catalog (per-platform BSP constants).
PlatformSpec cloud_cpu();
PlatformSpec satellite_cpu();
PlatformSpec jetson_nano();
PlatformSpec jetson_agx();
// Accepts "cloud_cpu", "satellite_cpu", "cpu", "nano", "agx" and the full ids.
PlatformSpec platform_by_name(const std::string& name);

struct WorkloadSpec {
  double work_flops = 79.1e9;  // per image
  double rho = 2346.0;         // raw-to-semantic compression ratio
  double semantic_bits_per_image = 336.0;

  void validate() const;
};

double mean_exec_time(const PlatformSpec& p, double f_hz, const WorkloadSpec& w);
double power_at(const PlatformSpec& p, double f_hz);
double energy_per_image(const PlatformSpec& p, double f_hz, const WorkloadSpec& w);

// Frequency at which `images` images exactly fill `t_slot`. Throws
// InfeasibleLoadError when even f_max is too slow.
double optimal_frequency(const PlatformSpec& p, const WorkloadSpec& w, double images, double t_slot);

// Largest image count one platform clears in t_slot at f_max.
double slot_capacity(const PlatformSpec& p, const WorkloadSpec& w, double t_slot);

// --- stochastic execution time ----------------------------------------------

struct ExecSample {
  double f_hz = 0.0;
  double seconds = 0.0;
};

struct GammaParams {
  double shape = 1.0;
  double scale = 1.0;
  double mean() const { return shape * scale; }
  double variance() const { return shape * scale * scale; }
};

struct FrequencyFit {
  double f_hz = 0.0;
  std::size_t n = 0;
  GammaParams mom;   // method-of-moments at this frequency
  double alpha_residual = 0.0;
  double theta_residual = 0.0;
};

struct ExecTimeModel {
  // Polynomials in f expressed in GHz: alpha(f) = sum c_i f^i.
  std::array<double, 4> alpha_coef{};
  std::array<double, 4> theta_coef{};
  double f_lo_hz = 0.0;
  double f_hi_hz = 0.0;
  std::vector<FrequencyFit> fits;

  double alpha(double f_hz) const;
  double theta(double f_hz) const;
  GammaParams at(double f_hz) const { return {alpha(f_hz), theta(f_hz)}; }
  bool covers(double f_hz) const;
};

// Groups samples by frequency, fits a Gamma per group by moments, then a
// cubic least-squares curve through shape and scale. Needs >= 4 distinct
// frequencies with >= 30 samples each; throws FitError otherwise.
ExecTimeModel fit_exec_model(const std::vector<ExecSample>& samples);

struct SyntheticLogSpec {
  double cv_at_fmax = 0.12;  // per-image coefficient of variation at f_max
  double f_lo_fraction = 0.5;
  int n_frequencies = 8;
  int samples_per_frequency = 400;
};

// Gamma-distributed per-image times whose mean follows the BSP model and
// whose coefficient of variation shrinks linearly with f below f_max.
std::vector<ExecSample> synthetic_exec_log(const PlatformSpec& p, const WorkloadSpec& w,
                                           const SyntheticLogSpec& spec, std::uint64_t seed);

// Fits a model to the synthetic log; convenient default per platform.
ExecTimeModel default_exec_model(const PlatformSpec& p, const WorkloadSpec& w,
                                 std::uint64_t seed = 7, const SyntheticLogSpec& spec = {});

struct BatchDistribution {
  GammaParams gamma;      // exact sum of n i.i.d. per-image Gammas
  double normal_mean = 0.0;
  double normal_var = 0.0;
  double mean() const { return gamma.mean(); }
  double variance() const { return gamma.variance(); }
  double quantile(double q) const;
  double normal_quantile(double q) const;
};

BatchDistribution batch_exec_distribution(const ExecTimeModel& model, double f_hz, int n_img);
BatchDistribution batch_exec_distribution(const GammaParams& per_image, int n_img);

// Draw from Gamma(shape, scale).
double sample_gamma(const GammaParams& g, Rng& rng);

// Per-image Gamma whose mean is the BSP value and whose variance comes from
// the fitted model.
GammaParams matched_gamma(const ExecTimeModel& model, const PlatformSpec& p, double f_hz,
                          const WorkloadSpec& w);

std::vector<ExecSample> load_exec_log_csv(const std::string& path);
nlohmann::json exec_model_to_json(const ExecTimeModel& m);
ExecTimeModel exec_model_from_json(const nlohmann::json& j);

}  // namespace orbitedge::compute
