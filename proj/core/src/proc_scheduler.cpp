#include "orbitedge/proc_scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "orbitedge/constants.hpp"
#include "orbitedge/errors.hpp"

namespace orbitedge::proc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int scatter_hops(const ProcessingInstance& inst, std::size_t p) {
  const int to = inst.is_ground(p) ? inst.dl_sat_scatter : inst.edge[p].ring_index;
  if (to < 0) return 0;
  return inst.source_extra_hops + network::ring_distance(inst.ring_size, inst.source, to);
}

int gather_hops(const ProcessingInstance& inst, std::size_t p) {
  if (inst.is_ground(p) || inst.dl_sat_gather < 0) return 0;
  return network::ring_distance(inst.ring_size, inst.edge[p].ring_index, inst.dl_sat_gather);
}

bool has_gather_contact(const ProcessingInstance& inst) {
  return inst.dl_sat_gather >= 0 && inst.rate_gather_bps > 0;
}

bool has_scatter_contact(const ProcessingInstance& inst) {
  return inst.dl_sat_scatter >= 0 && inst.rate_scatter_bps > 0;
}

// Images share -> processing energy at f*, and its derivative, for one
// processor. With q = work time per image at f_max and s = sync time:
// E(L) = P_max T (q L / (T - s L))^3.
struct ProcCurve {
  double p_max = 0, t = 0, q = 0, s = 0, n = 0;

  double energy(double x) const {
    const double L = n * x;
    const double g = q * L / (t - s * L);
    return p_max * t * g * g * g;
  }
  double derivative(double x) const {
    const double L = n * x;
    const double den = t - s * L;
    const double g = q * L / den;
    const double dg = q * t / (den * den);
    return n * 3.0 * p_max * t * g * g * dg;
  }
};

struct Model {
  std::size_t P = 0;
  std::vector<double> a;  // linear J per unit share
  std::vector<ProcCurve> curve;
  std::vector<double> lo, hi;
  std::vector<double> cap;  // processing caps alone
  // ISL links: coefficient rows (bits per unit share) and capacity.
  std::vector<std::vector<double>> link_coef;
  std::vector<std::string> link_name;
  double link_capacity = 0.0;
};

std::vector<int> route_links(int n, const network::Route& r) {
  std::vector<int> ids;
  for (std::size_t i = 1; i < r.nodes.size(); ++i) {
    const int a = r.nodes[i - 1], b = r.nodes[i];
    // Link i joins ring nodes i and i+1.
    ids.push_back(((b - a + n) % n) == 1 ? a : b);
  }
  return ids;
}

Model build_model(const ProcessingInstance& inst) {
  Model m;
  m.P = inst.processor_count();
  m.a.assign(m.P, 0.0);
  m.curve.resize(m.P);
  m.lo.assign(m.P, 0.0);
  m.hi.assign(m.P, 1.0);
  m.cap.assign(m.P, 1.0);
  const double D = inst.frame_bits();
  const auto& link = inst.link;
  const double rho = inst.workload.rho;
  const int N = inst.ring_size;

  m.link_coef.assign(static_cast<std::size_t>(N) + 1, std::vector<double>(m.P, 0.0));
  for (int i = 0; i < N; ++i) m.link_name.push_back("c:isl[" + std::to_string(i) + "-" + std::to_string((i + 1) % N) + "]");
  m.link_name.push_back("c:isl[entry]");
  m.link_capacity = inst.t_slot * link.r_isl_bps;

  for (std::size_t p = 0; p < m.P; ++p) {
    const auto& pl = inst.platform(p);
    const double q = pl.mu_c * inst.workload.work_flops / (pl.n_cores * pl.flops_per_cycle * pl.f_max_hz);
    m.curve[p] = {pl.p_max_w, inst.t_slot, q, pl.mu_sync_s, inst.n_img};
    m.cap[p] = std::min(1.0, inst.t_slot / (inst.n_img * (q + pl.mu_sync_s)));
    m.hi[p] = m.cap[p];
    const double hs = scatter_hops(inst, p);
    if (inst.is_ground(p)) {
      if (!has_scatter_contact(inst)) {
        m.hi[p] = 0.0;
        continue;
      }
      m.a[p] = hs * link.p_isl_w * D / link.r_isl_bps + link.p_dl_w * D / inst.rate_scatter_bps;
    } else {
      if (!has_gather_contact(inst)) {
        m.hi[p] = 0.0;
        continue;
      }
      const double hg = gather_hops(inst, p);
      m.a[p] = hs * link.p_isl_w * D / link.r_isl_bps + hg * link.p_isl_w * D / (rho * link.r_isl_bps) +
               link.p_dl_w * D / (rho * inst.rate_gather_bps);
    }
    // ISL loads.
    const int to = inst.is_ground(p) ? inst.dl_sat_scatter : inst.edge[p].ring_index;
    if (inst.source_extra_hops > 0) m.link_coef[N][p] += D;
    for (int l : route_links(N, network::shortest_route(N, inst.source, to))) m.link_coef[l][p] += D;
    if (!inst.is_ground(p))
      for (int l : route_links(N, network::shortest_route(N, inst.edge[p].ring_index, inst.dl_sat_gather)))
        m.link_coef[l][p] += D / rho;
  }
  return m;
}

// Applies the downlink budget for a given T_delay as bounds on the ground
// share (or a global infeasibility).
void apply_downlink(const ProcessingInstance& inst, Model& m, double td, std::vector<std::string>& violated,
                    bool& dl_binding_possible) {
  const double D = inst.frame_bits();
  const double rho = inst.workload.rho;
  const double window = std::max(0.0, inst.t_slot - td);
  const bool g = inst.ground.has_value();
  const std::size_t gi = inst.edge.size();
  dl_binding_possible = false;
  if (inst.convention == DownlinkConvention::kSplit) {
    const double comp_cap = has_gather_contact(inst) ? window * inst.rate_gather_bps : 0.0;
    // (1 - x_g) D / rho <= comp_cap
    const double min_ground = 1.0 - rho * comp_cap / D;
    if (g) {
      const double raw_cap = has_scatter_contact(inst) ? window * inst.rate_scatter_bps / D : 0.0;
      if (raw_cap < m.hi[gi]) {
        m.hi[gi] = raw_cap;
        dl_binding_possible = true;
      }
      if (min_ground > m.lo[gi]) {
        m.lo[gi] = min_ground;
        dl_binding_possible = true;
      }
    } else if (min_ground > 1e-12) {
      violated.push_back("c:dl");
    }
  } else {
    const double cap = has_gather_contact(inst) ? window * inst.rate_gather_bps / D : 0.0;
    // x_g (1 - 1/rho) + 1/rho <= cap
    if (rho == 1.0 || !g) {
      const double need = g ? 1.0 : 1.0 / rho;
      if (need > cap + 1e-12) violated.push_back("c:dl");
    } else {
      const double max_ground = (cap - 1.0 / rho) / (1.0 - 1.0 / rho);
      if (max_ground < m.hi[gi]) {
        m.hi[gi] = max_ground;
        dl_binding_possible = true;
      }
    }
  }
}

struct InnerResult {
  std::vector<double> x;
  double nu = 0.0;
};

double phi_prime(const Model& m, std::size_t p, double x, const std::vector<double>& shift) {
  return m.a[p] + shift[p] + m.curve[p].derivative(x);
}

double x_at(const Model& m, std::size_t p, double nu, const std::vector<double>& shift) {
  const double lo = m.lo[p], hi = m.hi[p];
  if (hi <= lo) return lo;
  if (phi_prime(m, p, lo, shift) >= nu) return lo;
  if (phi_prime(m, p, hi, shift) <= nu) return hi;
  double a = lo, b = hi;
  for (int it = 0; it < 200 && b - a > 1e-17; ++it) {
    const double c = 0.5 * (a + b);
    (phi_prime(m, p, c, shift) < nu ? a : b) = c;
  }
  return 0.5 * (a + b);
}

// Minimizes sum phi_p(x_p) + shift_p x_p over the box-constrained simplex.
InnerResult inner_solve(const Model& m, const std::vector<double>& shift) {
  double nlo = kInf, nhi = -kInf;
  for (std::size_t p = 0; p < m.P; ++p) {
    if (m.hi[p] <= m.lo[p]) continue;
    nlo = std::min(nlo, phi_prime(m, p, m.lo[p], shift));
    nhi = std::max(nhi, phi_prime(m, p, m.hi[p], shift));
  }
  InnerResult r;
  r.x.assign(m.P, 0.0);
  if (!(nlo < kInf)) {
    for (std::size_t p = 0; p < m.P; ++p) r.x[p] = m.lo[p];
    return r;
  }
  auto sum_at = [&](double nu, std::vector<double>& xs) {
    double s = 0.0;
    for (std::size_t p = 0; p < m.P; ++p) s += xs[p] = x_at(m, p, nu, shift);
    return s;
  };
  std::vector<double> xl(m.P), xh(m.P);
  double sl = sum_at(nlo, xl), sh = sum_at(nhi, xh);
  double a = nlo, b = nhi;
  for (int it = 0; it < 300 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
    const double c = 0.5 * (a + b);
    std::vector<double> xc(m.P);
    const double sc = sum_at(c, xc);
    if (sc < 1.0) {
      a = c;
      xl = std::move(xc);
      sl = sc;
    } else {
      b = c;
      xh = std::move(xc);
      sh = sc;
    }
  }
  // Interpolate between the bracketing points so the shares sum to one.
  const double t = sh > sl ? std::clamp((1.0 - sl) / (sh - sl), 0.0, 1.0) : 1.0;
  for (std::size_t p = 0; p < m.P; ++p) r.x[p] = xl[p] + t * (xh[p] - xl[p]);
  r.nu = 0.5 * (a + b);
  return r;
}

double link_load(const Model& m, std::size_t l, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t p = 0; p < m.P; ++p) s += m.link_coef[l][p] * x[p];
  return s;
}

std::vector<double> shift_for(const Model& m, const std::vector<double>& lambda) {
  std::vector<double> s(m.P, 0.0);
  for (std::size_t l = 0; l < lambda.size(); ++l)
    if (lambda[l] > 0)
      for (std::size_t p = 0; p < m.P; ++p) s[p] += lambda[l] * m.link_coef[l][p];
  return s;
}

// Dual coordinate ascent on the ISL capacity multipliers.
InnerResult solve_with_links(const Model& m, std::vector<double>& lambda, bool& ok) {
  ok = true;
  lambda.assign(m.link_coef.size(), 0.0);
  InnerResult r = inner_solve(m, shift_for(m, lambda));
  const double cap = m.link_capacity;
  for (int round = 0; round < 60; ++round) {
    bool changed = false;
    for (std::size_t l = 0; l < lambda.size(); ++l) {
      const double load = link_load(m, l, r.x);
      if (load <= cap * (1 + 1e-12) && (lambda[l] == 0.0 || load >= cap * (1 - 1e-9))) continue;
      auto load_at = [&](double v) {
        auto lam = lambda;
        lam[l] = v;
        return link_load(m, l, inner_solve(m, shift_for(m, lam)).x);
      };
      double lo = 0.0, hi = std::max(lambda[l], 1e-12);
      if (load_at(0.0) <= cap) {
        lambda[l] = 0.0;
      } else {
        while (load_at(hi) > cap) {
          hi *= 4.0;
          if (hi > 1e30) {
            ok = false;
            return r;
          }
        }
        for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
          const double c = 0.5 * (lo + hi);
          (load_at(c) > cap ? lo : hi) = c;
        }
        lambda[l] = hi;
      }
      r = inner_solve(m, shift_for(m, lambda));
      changed = true;
    }
    if (!changed) break;
  }
  for (std::size_t l = 0; l < lambda.size(); ++l)
    if (link_load(m, l, r.x) > cap * (1 + 1e-9)) ok = false;
  return r;
}

double propagation_bound(const ProcessingInstance& inst) {
  return (inst.ring_size / 2) * inst.d_isl_m / kSpeedOfLight + inst.d_eg_gather_m / kSpeedOfLight;
}

}  // namespace

void ProcessingInstance::validate() const {
  std::vector<std::string> problems;
  if (!(t_slot > 0)) problems.push_back("slot duration must be positive");
  if (!(n_img > 0)) problems.push_back("image count must be positive");
  if (!(img_bits > 0)) problems.push_back("image size must be positive");
  if (ring_size < 1) problems.push_back("ring size must be positive");
  if (source < 0 || source >= ring_size) problems.push_back("source outside the ring");
  if (edge.empty() && !ground) problems.push_back("no processors");
  for (const auto& e : edge)
    if (e.ring_index < 0 || e.ring_index >= ring_size) problems.push_back("edge processor outside the ring");
  if (dl_sat_scatter >= ring_size || dl_sat_gather >= ring_size) problems.push_back("downlink satellite outside the ring");
  if (!(workload.rho >= 1.0)) problems.push_back("compression ratio must be >= 1");
  if (!problems.empty()) throw ValidationError(problems);
}

const compute::PlatformSpec& ProcessingInstance::platform(std::size_t i) const {
  if (i < edge.size()) return edge[i].platform;
  if (ground && i == edge.size()) return *ground;
  throw DomainError("processor index out of range");
}

EnergyBreakdown energy_breakdown(const ProcessingInstance& inst, const std::vector<double>& x,
                                 const std::vector<double>& f) {
  if (x.size() != inst.processor_count() || f.size() != x.size())
    throw DomainError("allocation size does not match the processor count");
  EnergyBreakdown e;
  const double D = inst.frame_bits();
  const double rho = inst.workload.rho;
  for (std::size_t p = 0; p < x.size(); ++p) {
    if (x[p] <= 0.0) continue;
    const double bits = x[p] * D;
    const auto& pl = inst.platform(p);
    const double proc = bits / inst.img_bits * compute::energy_per_image(pl, f[p], inst.workload);
    e.scatter_isl += scatter_hops(inst, p) * network::isl_tx_energy(bits, inst.link);
    if (inst.is_ground(p)) {
      e.scatter_dl += network::dl_tx_energy(bits, inst.rate_scatter_bps, inst.link);
      e.processing_ground += proc;
    } else {
      e.processing_edge += proc;
      e.gather_isl += gather_hops(inst, p) * network::isl_tx_energy(bits / rho, inst.link);
      e.gather_dl += network::dl_tx_energy(bits / rho, inst.rate_gather_bps, inst.link);
    }
  }
  return e;
}

double total_energy(const ProcessingInstance& inst, const std::vector<double>& x, const std::vector<double>& f) {
  return energy_breakdown(inst, x, f).total();
}

double t_delay(const ProcessingInstance& inst, const std::vector<double>& x, const std::vector<double>& f) {
  double td = 0.0;
  const double D = inst.frame_bits();
  for (std::size_t p = 0; p < inst.edge.size(); ++p) {
    if (x[p] <= 0.0) continue;
    if (!has_gather_contact(inst)) return kInf;
    network::Route r = network::route_to_ground(inst.ring_size, inst.edge[p].ring_index, inst.dl_sat_gather);
    const double comm = network::comm_latency_compressed(r, x[p] * D, inst.workload.rho, inst.link, inst.d_isl_m,
                                                         inst.rate_gather_bps, inst.d_eg_gather_m);
    const double proc = x[p] * D / inst.img_bits * compute::mean_exec_time(inst.platform(p), f[p], inst.workload);
    td = std::max(td, comm + std::max(proc - inst.t_slot, 0.0));
  }
  return td;
}

std::vector<double> processing_caps(const ProcessingInstance& inst) {
  std::vector<double> c(inst.processor_count());
  for (std::size_t p = 0; p < c.size(); ++p)
    c[p] = std::min(1.0, compute::slot_capacity(inst.platform(p), inst.workload, inst.t_slot) / inst.n_img);
  return c;
}

std::vector<double> optimal_frequencies(const ProcessingInstance& inst, const std::vector<double>& x) {
  std::vector<double> f(x.size(), 0.0);
  for (std::size_t p = 0; p < x.size(); ++p)
    if (x[p] > 0.0) f[p] = compute::optimal_frequency(inst.platform(p), inst.workload, x[p] * inst.n_img, inst.t_slot);
  return f;
}

double substituted_energy(const ProcessingInstance& inst, const std::vector<double>& x) {
  const auto caps = processing_caps(inst);
  for (std::size_t p = 0; p < x.size(); ++p)
    if (x[p] > caps[p] * (1 + 1e-12)) return kInf;
  return total_energy(inst, x, optimal_frequencies(inst, x));
}

AllocationPlan solve(const ProcessingInstance& inst, const SolveOptions& opts) {
  inst.validate();
  const Model base = build_model(inst);

  double td = propagation_bound(inst);
  AllocationPlan plan;
  for (int iter = 0; iter <= opts.delay_iterations; ++iter) {
    Model m = base;
    std::vector<std::string> violated;
    bool dl_bounds = false;
    apply_downlink(inst, m, td, violated, dl_bounds);
    double lo_sum = 0.0, hi_sum = 0.0, cap_sum = 0.0;
    for (std::size_t p = 0; p < m.P; ++p) {
      lo_sum += m.lo[p];
      hi_sum += m.hi[p];
      cap_sum += base.hi[p];
      if (m.lo[p] > m.hi[p] + 1e-12) violated.push_back("c:dl");
    }
    if (cap_sum < 1.0 - 1e-12) violated.push_back("c:proc");
    else if (hi_sum < 1.0 - 1e-12) violated.push_back("c:dl");
    if (lo_sum > 1.0 + 1e-12) violated.push_back("c:dl");
    if (!violated.empty()) {
      std::sort(violated.begin(), violated.end());
      violated.erase(std::unique(violated.begin(), violated.end()), violated.end());
      std::string what = "no feasible allocation:";
      for (const auto& v : violated) what += " " + v;
      throw InfeasibleAllocationError(what, violated);
    }

    std::vector<double> lambda;
    bool ok = true;
    InnerResult r = solve_with_links(m, lambda, ok);
    if (!ok) throw InfeasibleAllocationError("no feasible allocation: c:isl", {"c:isl"});

    plan = AllocationPlan{};
    plan.x = r.x;
    for (auto& v : plan.x)
      if (v < 1e-15) v = 0.0;
    plan.f = optimal_frequencies(inst, plan.x);
    plan.energy = energy_breakdown(inst, plan.x, plan.f);
    plan.predicted_energy = 0.0;
    for (std::size_t p = 0; p < m.P; ++p)
      if (plan.x[p] > 0) plan.predicted_energy += m.a[p] * plan.x[p] + m.curve[p].energy(plan.x[p]);
    plan.t_delay = t_delay(inst, plan.x, plan.f);

    // KKT residual relative to the multiplier scale.
    const auto shift = shift_for(m, lambda);
    double res = 0.0;
    const double scale = std::max(1.0, std::abs(r.nu));
    for (std::size_t p = 0; p < m.P; ++p) {
      if (m.hi[p] <= m.lo[p]) continue;
      const double g = phi_prime(m, p, plan.x[p], shift) - r.nu;
      double v = std::abs(g);
      if (plan.x[p] <= m.lo[p] + 1e-12) v = std::max(0.0, -g);
      else if (plan.x[p] >= m.hi[p] - 1e-12) v = std::max(0.0, g);
      res = std::max(res, v / scale);
    }
    plan.kkt_residual = res;

    plan.binding.clear();
    for (std::size_t p = 0; p < m.P; ++p) {
      if (plan.x[p] >= base.cap[p] - 1e-12 && base.cap[p] < 1.0)
        plan.binding.push_back("c:proc[" + std::to_string(p) + "]");
    }
    if (dl_bounds && inst.ground) {
      const std::size_t gi = inst.edge.size();
      if ((m.hi[gi] < base.hi[gi] && plan.x[gi] >= m.hi[gi] - 1e-12) || (m.lo[gi] > 0 && plan.x[gi] <= m.lo[gi] + 1e-12))
        plan.binding.push_back("c:dl");
    }
    for (std::size_t l = 0; l < lambda.size(); ++l)
      if (lambda[l] > 0) plan.binding.push_back(base.link_name[l]);

    if (iter < opts.delay_iterations) {
      const double next = plan.t_delay;
      if (!std::isfinite(next) || std::abs(next - td) <= 1e-12) break;
      td = next;
    }
  }
  return plan;
}

LoadCapacity max_supported_load(const std::vector<compute::PlatformSpec>& platforms, const compute::WorkloadSpec& w,
                                double t_slot) {
  if (!(t_slot > 0)) throw DomainError("slot duration must be positive");
  LoadCapacity c;
  for (const auto& p : platforms) c.images_per_slot += compute::slot_capacity(p, w, t_slot);
  c.fps = c.images_per_slot / t_slot;
  return c;
}

nlohmann::json plan_to_json(const ProcessingInstance& inst, const AllocationPlan& plan) {
  nlohmann::json j;
  j["processors"] = nlohmann::json::array();
  for (std::size_t p = 0; p < plan.x.size(); ++p) {
    nlohmann::json q;
    q["platform"] = inst.platform(p).id;
    q["ground"] = inst.is_ground(p);
    if (!inst.is_ground(p)) q["ring_index"] = inst.edge[p].ring_index;
    q["x"] = plan.x[p];
    q["f_hz"] = plan.f[p];
    q["images"] = plan.x[p] * inst.n_img;
    j["processors"].push_back(std::move(q));
  }
  j["energy_j"] = {{"scatter_isl", plan.energy.scatter_isl},
                   {"scatter_dl", plan.energy.scatter_dl},
                   {"processing_edge", plan.energy.processing_edge},
                   {"processing_ground", plan.energy.processing_ground},
                   {"gather_isl", plan.energy.gather_isl},
                   {"gather_dl", plan.energy.gather_dl},
                   {"total", plan.energy.total()}};
  j["predicted_energy_j"] = plan.predicted_energy;
  j["t_delay_s"] = plan.t_delay;
  j["kkt_residual"] = plan.kkt_residual;
  j["binding"] = plan.binding;
  return j;
}

}  // namespace orbitedge::proc
