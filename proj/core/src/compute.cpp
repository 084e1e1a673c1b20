#include "orbitedge/compute.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <nlohmann/json.hpp>

#include "orbitedge/errors.hpp"

namespace orbitedge::compute {

namespace {

void check_frequency(const PlatformSpec& p, double f) {
  // Allow a hair above f_max so round-tripped f* values are accepted.
  if (!(f > 0.0) || f > p.f_max_hz * (1.0 + 1e-12))
    throw DomainError("frequency " + std::to_string(f) + " Hz outside (0, f_max] for " + p.id);
}

double horner(const std::array<double, 4>& c, double x) {
  return ((c[3] * x + c[2]) * x + c[1]) * x + c[0];
}

}  // namespace

void PlatformSpec::validate() const {
  if (n_cores < 1 || !(f_max_hz > 0) || !(p_max_w > 0) || !(flops_per_cycle > 0) || !(mu_c > 0) ||
      !(mu_sync_s >= 0))
    throw ConfigError("platform '" + id + "' has non-positive constants");
}

double PlatformSpec::max_fps(double work_flops) const {
  return 1.0 / (mu_c * work_flops / (n_cores * flops_per_cycle * f_max_hz) + mu_sync_s);
}

PlatformSpec cloud_cpu() { return {"cloud_cpu", 64, 2.6e9, 280.0, 32.0, 1.079, 0.0, NodeKind::kGround}; }
PlatformSpec satellite_cpu() { return {"satellite_cpu", 8, 1.8e9, 6.0, 32.0, 1.079, 0.0, NodeKind::kSatellite}; }
PlatformSpec jetson_nano() { return {"jetson_nano", 1024, 1.02e9, 25.0, 2.0, 1.071, 17.48e-3, NodeKind::kSatellite}; }
PlatformSpec jetson_agx() { return {"jetson_agx", 2048, 1.3e9, 60.0, 2.0, 1.122, 14.14e-3, NodeKind::kSatellite}; }

PlatformSpec platform_by_name(const std::string& name) {
  if (name == "cloud_cpu" || name == "ground_cpu") return cloud_cpu();
  if (name == "satellite_cpu" || name == "cpu") return satellite_cpu();
  if (name == "jetson_nano" || name == "nano") return jetson_nano();
  if (name == "jetson_agx" || name == "agx") return jetson_agx();
  throw ConfigError("unknown platform '" + name + "'");
}

void WorkloadSpec::validate() const {
  if (!(work_flops > 0)) throw ConfigError("workload must be positive");
  if (!(rho >= 1.0)) throw ConfigError("compression ratio must be >= 1");
  if (!(semantic_bits_per_image >= 0)) throw ConfigError("semantic bits must be non-negative");
}

double mean_exec_time(const PlatformSpec& p, double f, const WorkloadSpec& w) {
  check_frequency(p, f);
  return p.mu_c * w.work_flops / (p.n_cores * p.flops_per_cycle * f) + p.mu_sync_s;
}

double power_at(const PlatformSpec& p, double f) {
  check_frequency(p, f);
  const double r = f / p.f_max_hz;
  return p.p_max_w * r * r * r;
}

double energy_per_image(const PlatformSpec& p, double f, const WorkloadSpec& w) {
  return power_at(p, f) * mean_exec_time(p, f, w);
}

double optimal_frequency(const PlatformSpec& p, const WorkloadSpec& w, double images, double t_slot) {
  if (!(images > 0) || !(t_slot > 0)) throw DomainError("load and slot must be positive");
  const double per_image = t_slot / images;
  if (per_image <= p.mu_sync_s)
    throw InfeasibleLoadError(p.id + ": slot share below the synchronization overhead");
  const double f = p.mu_c * w.work_flops / (p.n_cores * p.flops_per_cycle * (per_image - p.mu_sync_s));
  if (f > p.f_max_hz * (1.0 + 1e-12))
    throw InfeasibleLoadError(p.id + ": load needs " + std::to_string(f / 1e9) + " GHz");
  return std::min(f, p.f_max_hz);
}

double slot_capacity(const PlatformSpec& p, const WorkloadSpec& w, double t_slot) {
  return t_slot / mean_exec_time(p, p.f_max_hz, w);
}

// ---------------------------------------------------------------------------

double ExecTimeModel::alpha(double f_hz) const { return horner(alpha_coef, f_hz * 1e-9); }
double ExecTimeModel::theta(double f_hz) const { return horner(theta_coef, f_hz * 1e-9); }

bool ExecTimeModel::covers(double f_hz) const {
  const double tol = 1e-9 * f_hi_hz;
  return f_hz >= f_lo_hz - tol && f_hz <= f_hi_hz + tol;
}

ExecTimeModel fit_exec_model(const std::vector<ExecSample>& samples) {
  std::map<double, std::vector<double>> groups;
  for (const auto& s : samples) {
    if (!(s.f_hz > 0) || !(s.seconds > 0)) throw FitError("execution samples must be positive");
    groups[s.f_hz].push_back(s.seconds);
  }
  if (groups.size() < 4) throw FitError("need at least 4 distinct frequencies, got " + std::to_string(groups.size()));

  ExecTimeModel m;
  for (const auto& [f, xs] : groups) {
    if (xs.size() < 30)
      throw FitError("need at least 30 samples per frequency (" + std::to_string(xs.size()) + " at " +
                     std::to_string(f) + " Hz)");
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= xs.size() - 1;
    if (!(var > 1e-18 * mean * mean)) throw FitError("zero-variance samples; Gamma fit undefined");
    FrequencyFit fit;
    fit.f_hz = f;
    fit.n = xs.size();
    fit.mom = {mean * mean / var, var / mean};
    m.fits.push_back(fit);
  }
  m.f_lo_hz = m.fits.front().f_hz;
  m.f_hi_hz = m.fits.back().f_hz;

  const int n = static_cast<int>(m.fits.size());
  Eigen::MatrixXd A(n, 4);
  Eigen::VectorXd ya(n), yt(n);
  for (int i = 0; i < n; ++i) {
    const double x = m.fits[i].f_hz * 1e-9;
    A(i, 0) = 1.0;
    A(i, 1) = x;
    A(i, 2) = x * x;
    A(i, 3) = x * x * x;
    ya(i) = m.fits[i].mom.shape;
    yt(i) = m.fits[i].mom.scale;
  }
  const auto qr = A.colPivHouseholderQr();
  const Eigen::VectorXd ca = qr.solve(ya);
  const Eigen::VectorXd ct = qr.solve(yt);
  for (int i = 0; i < 4; ++i) {
    m.alpha_coef[i] = ca(i);
    m.theta_coef[i] = ct(i);
  }
  for (auto& fit : m.fits) {
    fit.alpha_residual = m.alpha(fit.f_hz) - fit.mom.shape;
    fit.theta_residual = m.theta(fit.f_hz) - fit.mom.scale;
  }
  // The cubic must stay positive over the fitted range.
  for (int k = 0; k <= 200; ++k) {
    const double f = m.f_lo_hz + (m.f_hi_hz - m.f_lo_hz) * k / 200.0;
    if (!(m.alpha(f) > 0) || !(m.theta(f) > 0)) throw FitError("fitted Gamma parameters turn non-positive");
  }
  return m;
}

std::vector<ExecSample> synthetic_exec_log(const PlatformSpec& p, const WorkloadSpec& w,
                                           const SyntheticLogSpec& spec, std::uint64_t seed) {
  if (spec.n_frequencies < 1 || spec.samples_per_frequency < 1 || !(spec.cv_at_fmax > 0) ||
      !(spec.f_lo_fraction > 0) || spec.f_lo_fraction > 1)
    throw ConfigError("bad synthetic log settings");
  Rng rng = make_rng(seed, Stream::kExecTime, 1000);
  std::vector<ExecSample> out;
  out.reserve(static_cast<std::size_t>(spec.n_frequencies) * spec.samples_per_frequency);
  for (int i = 0; i < spec.n_frequencies; ++i) {
    const double frac =
        spec.n_frequencies == 1 ? 1.0
                                : spec.f_lo_fraction + (1.0 - spec.f_lo_fraction) * i / (spec.n_frequencies - 1);
    const double f = p.f_max_hz * frac;
    const double mu = mean_exec_time(p, f, w);
    const double cv = spec.cv_at_fmax * frac;
    const GammaParams g{1.0 / (cv * cv), mu * cv * cv};
    for (int k = 0; k < spec.samples_per_frequency; ++k) out.push_back({f, sample_gamma(g, rng)});
  }
  return out;
}

ExecTimeModel default_exec_model(const PlatformSpec& p, const WorkloadSpec& w, std::uint64_t seed,
                                 const SyntheticLogSpec& spec) {
  return fit_exec_model(synthetic_exec_log(p, w, spec, seed));
}

double BatchDistribution::quantile(double q) const {
  boost::math::gamma_distribution<double> d(gamma.shape, gamma.scale);
  return boost::math::quantile(d, q);
}

double BatchDistribution::normal_quantile(double q) const {
  boost::math::normal_distribution<double> d(normal_mean, std::sqrt(normal_var));
  return boost::math::quantile(d, q);
}

BatchDistribution batch_exec_distribution(const GammaParams& g, int n_img) {
  if (n_img < 1) throw DomainError("batch needs at least one image");
  if (!(g.shape > 0) || !(g.scale > 0)) throw DomainError("Gamma parameters must be positive");
  BatchDistribution b;
  b.gamma = {n_img * g.shape, g.scale};
  b.normal_mean = n_img * g.mean();
  b.normal_var = n_img * g.variance();
  return b;
}

BatchDistribution batch_exec_distribution(const ExecTimeModel& model, double f_hz, int n_img) {
  return batch_exec_distribution(model.at(f_hz), n_img);
}

double sample_gamma(const GammaParams& g, Rng& rng) {
  boost::random::gamma_distribution<double> d(g.shape, g.scale);
  return d(rng);
}

GammaParams matched_gamma(const ExecTimeModel& model, const PlatformSpec& p, double f_hz,
                          const WorkloadSpec& w) {
  const double mu = mean_exec_time(p, f_hz, w);
  // Outside the fitted range the coefficient of variation is held at the
  // nearest edge rather than extrapolating the cubic.
  const double fc = std::clamp(f_hz, model.f_lo_hz, model.f_hi_hz);
  const double cv2 = 1.0 / model.alpha(fc);
  return {1.0 / cv2, mu * cv2};
}

std::vector<ExecSample> load_exec_log_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open execution log '" + path + "'");
  std::vector<ExecSample> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    ExecSample s;
    if (!(ss >> s.f_hz >> s.seconds)) {
      if (out.empty() && lineno == 1) continue;  // header
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'frequency_hz,seconds'");
    }
    out.push_back(s);
  }
  return out;
}

nlohmann::json exec_model_to_json(const ExecTimeModel& m) {
  nlohmann::json j;
  j["frequency_unit"] = "GHz";
  j["alpha"] = m.alpha_coef;
  j["theta"] = m.theta_coef;
  j["f_lo_hz"] = m.f_lo_hz;
  j["f_hi_hz"] = m.f_hi_hz;
  j["fits"] = nlohmann::json::array();
  for (const auto& f : m.fits)
    j["fits"].push_back({{"f_hz", f.f_hz},
                         {"n", f.n},
                         {"alpha", f.mom.shape},
                         {"theta", f.mom.scale},
                         {"alpha_residual", f.alpha_residual},
                         {"theta_residual", f.theta_residual}});
  return j;
}

ExecTimeModel exec_model_from_json(const nlohmann::json& j) {
  try {
    ExecTimeModel m;
    m.alpha_coef = j.at("alpha").get<std::array<double, 4>>();
    m.theta_coef = j.at("theta").get<std::array<double, 4>>();
    m.f_lo_hz = j.at("f_lo_hz").get<double>();
    m.f_hi_hz = j.at("f_hi_hz").get<double>();
    if (j.contains("fits"))
      for (const auto& f : j.at("fits")) {
        FrequencyFit fit;
        fit.f_hz = f.at("f_hz").get<double>();
        fit.n = f.value("n", std::size_t{0});
        fit.mom = {f.at("alpha").get<double>(), f.at("theta").get<double>()};
        fit.alpha_residual = f.value("alpha_residual", 0.0);
        fit.theta_residual = f.value("theta_residual", 0.0);
        m.fits.push_back(fit);
      }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad execution model: ") + e.what());
  }
}

}  // namespace orbitedge::compute
