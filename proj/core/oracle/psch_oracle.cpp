#include <algorithm>
#include <cmath>
#include <limits>

#include "orbitedge/errors.hpp"
#include "orbitedge/oracle.hpp"

namespace orbitedge::oracle {

namespace {

constexpr double kLight = 299'792'458.0;

int hops(int n, int a, int b) {
  int d = std::abs(a - b) % n;
  return std::min(d, n - d);
}

// Link ids along the shorter arc from a to b; link i joins nodes i and i+1.
// On an exact half-ring tie the increasing direction is taken.
std::vector<int> arc(int n, int a, int b) {
  std::vector<int> out;
  const int fwd = ((b - a) % n + n) % n;
  if (fwd <= n - fwd) {
    for (int k = 0; k < fwd; ++k) out.push_back((a + k) % n);
  } else {
    for (int k = 0; k < n - fwd; ++k) out.push_back(((a - k - 1) % n + n) % n);
  }
  return out;
}

}  // namespace

PschEvaluation evaluate_allocation(const proc::ProcessingInstance& inst, const std::vector<double>& x,
                                   double tol) {
  PschEvaluation ev;
  const std::size_t E = inst.edge.size();
  const std::size_t P = E + (inst.ground ? 1 : 0);
  if (x.size() != P) throw DomainError("share vector has the wrong length");
  const double D = inst.n_img * inst.img_bits;
  const double T = inst.t_slot;
  const double rho = inst.workload.rho;
  const auto& L = inst.link;
  const int N = inst.ring_size;
  auto flag = [&](const std::string& c) {
    if (std::find(ev.violated.begin(), ev.violated.end(), c) == ev.violated.end()) ev.violated.push_back(c);
  };

  double sum = 0.0;
  for (double v : x) {
    if (v < -tol) flag("simplex");
    sum += v;
  }
  if (std::fabs(sum - 1.0) > tol) flag("simplex");

  const bool scatter_ok = inst.dl_sat_scatter >= 0 && inst.rate_scatter_bps > 0;
  const bool gather_ok = inst.dl_sat_gather >= 0 && inst.rate_gather_bps > 0;
  std::vector<double> link_bits(static_cast<std::size_t>(N) + 1, 0.0);
  double energy = 0.0, td = 0.0, comp_bits = 0.0, raw_bits = 0.0;

  for (std::size_t p = 0; p < P; ++p) {
    if (x[p] <= 0.0) continue;
    const bool ground = p == E;
    const auto& pl = ground ? *inst.ground : inst.edge[p].platform;
    const double images = x[p] * inst.n_img;
    const double per_image_fmax = pl.mu_c * inst.workload.work_flops / (pl.n_cores * pl.flops_per_cycle * pl.f_max_hz);
    if (images * (per_image_fmax + pl.mu_sync_s) > T * (1 + tol)) {
      flag("c:proc");
      continue;
    }
    // Slowest clock that finishes `images` in T.
    const double f = images * pl.mu_c * inst.workload.work_flops /
                     (pl.n_cores * pl.flops_per_cycle * (T - images * pl.mu_sync_s));
    const double u = std::min(f / pl.f_max_hz, 1.0);
    energy += pl.p_max_w * u * u * u * T;

    const double bits = x[p] * D;
    if (ground) {
      if (!scatter_ok) {
        flag("c:dl");
        continue;
      }
      const int h = inst.source_extra_hops + hops(N, inst.source, inst.dl_sat_scatter);
      energy += h * L.p_isl_w * bits / L.r_isl_bps + L.p_dl_w * bits / inst.rate_scatter_bps;
      raw_bits += bits;
      for (int l : arc(N, inst.source, inst.dl_sat_scatter)) link_bits[l] += bits;
    } else {
      if (!gather_ok) {
        flag("c:dl");
        continue;
      }
      const int r = inst.edge[p].ring_index;
      const int hs = inst.source_extra_hops + hops(N, inst.source, r);
      const int hg = hops(N, r, inst.dl_sat_gather);
      const double c = bits / rho;
      energy += hs * L.p_isl_w * bits / L.r_isl_bps + hg * L.p_isl_w * c / L.r_isl_bps +
                L.p_dl_w * c / inst.rate_gather_bps;
      comp_bits += c;
      for (int l : arc(N, inst.source, r)) link_bits[l] += bits;
      for (int l : arc(N, r, inst.dl_sat_gather)) link_bits[l] += c;
      const double latency = hg * (c / L.r_isl_bps + inst.d_isl_m / kLight) + c / inst.rate_gather_bps +
                             inst.d_eg_gather_m / kLight;
      td = std::max(td, latency);
    }
    if (inst.source_extra_hops > 0) link_bits[N] += bits;
  }

  const double cap = T * L.r_isl_bps;
  for (double b : link_bits)
    if (b > cap * (1 + tol)) flag("c:isl");

  const double window = T - td;
  if (inst.convention == proc::DownlinkConvention::kSplit) {
    if (raw_bits > 0 && raw_bits > window * inst.rate_scatter_bps * (1 + tol)) flag("c:dl");
    if (comp_bits > 0 && comp_bits > window * inst.rate_gather_bps * (1 + tol)) flag("c:dl");
  } else {
    const double need = raw_bits + comp_bits;
    if (need > 0 && (!gather_ok || need > window * inst.rate_gather_bps * (1 + tol))) flag("c:dl");
  }

  ev.energy = energy;
  ev.t_delay = td;
  ev.feasible = ev.violated.empty();
  return ev;
}

GridResult grid_search_psch(const proc::ProcessingInstance& inst, double step) {
  const std::size_t P = inst.edge.size() + (inst.ground ? 1 : 0);
  if (P < 1 || P > 3) throw SizeLimitError("grid oracle handles one to three processors");
  const int S = static_cast<int>(std::lround(1.0 / step));
  GridResult best;
  best.energy = std::numeric_limits<double>::infinity();
  auto visit = [&](std::vector<double> x) {
    ++best.points;
    const auto ev = evaluate_allocation(inst, x, 1e-12);
    if (ev.feasible && ev.energy < best.energy) {
      best.energy = ev.energy;
      best.x = std::move(x);
      best.feasible = true;
    }
  };
  if (P == 1) {
    visit({1.0});
  } else if (P == 2) {
    for (int i = 0; i <= S; ++i) visit({double(i) / S, double(S - i) / S});
  } else {
    for (int i = 0; i <= S; ++i)
      for (int j = 0; i + j <= S; ++j) visit({double(i) / S, double(j) / S, double(S - i - j) / S});
  }
  return best;
}

}  // namespace orbitedge::oracle
