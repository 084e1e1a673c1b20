#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "orbitedge/compute.hpp"
#include "orbitedge/proc_scheduler.hpp"

namespace orbitedge::testdata {

// Random allocation instance with at most three processors: one to three
// edge nodes on a 23-ring, with or without the ground segment.
inline proc::ProcessingInstance random_psch_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  auto pick = [&](int n) { return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(rng)); };
  const compute::PlatformSpec kinds[] = {compute::jetson_agx(), compute::jetson_nano(), compute::satellite_cpu()};

  proc::ProcessingInstance inst;
  const bool ground = pick(4) != 0;
  const int edges = ground ? 1 + pick(2) : 1 + pick(3);
  std::vector<int> used;
  for (int e = 0; e < edges; ++e) {
    int r;
    do r = pick(23);
    while (std::find(used.begin(), used.end(), r) != used.end());
    used.push_back(r);
    inst.edge.push_back({kinds[pick(3)], r});
  }
  if (ground) inst.ground = compute::cloud_cpu();
  inst.t_slot = uni(5.0, 20.0);
  inst.n_img = std::floor(uni(20.0, 60.0 * inst.t_slot));
  inst.source = pick(23);
  inst.source_extra_hops = pick(2);
  inst.source_extra_range_m = inst.source_extra_hops ? 1.2e6 : 0.0;
  inst.dl_sat_scatter = pick(23);
  inst.rate_scatter_bps = uni(5e7, 2.95e9);
  inst.d_eg_scatter_m = uni(617e3, 2200e3);
  inst.dl_sat_gather = pick(23);
  inst.rate_gather_bps = uni(5e7, 2.95e9);
  inst.d_eg_gather_m = uni(617e3, 2200e3);
  if (pick(2)) inst.convention = proc::DownlinkConvention::kShared;
  return inst;
}

}  // namespace orbitedge::testdata
