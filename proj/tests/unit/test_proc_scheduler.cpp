#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "../common/psch_instances.hpp"
#include "orbitedge/errors.hpp"
#include "orbitedge/oracle.hpp"
#include "orbitedge/proc_scheduler.hpp"

using namespace orbitedge;
using namespace orbitedge::proc;

namespace {

ProcessingInstance base_instance() {
  ProcessingInstance inst;
  inst.n_img = 400;
  inst.t_slot = 10.0;
  inst.source = 0;
  inst.dl_sat_scatter = 3;
  inst.rate_scatter_bps = 2.3e9;
  inst.d_eg_scatter_m = 1.0e6;
  inst.dl_sat_gather = 3;
  inst.rate_gather_bps = 2.3e9;
  inst.d_eg_gather_m = 1.0e6;
  return inst;
}

// Cubic power law at the clock that exactly fills the slot.
double hand_processing(const compute::PlatformSpec& p, double images, double T) {
  const double f = images * p.mu_c * 79.1e9 / (p.n_cores * p.flops_per_cycle * (T - images * p.mu_sync_s));
  const double u = f / p.f_max_hz;
  return p.p_max_w * u * u * u * T;
}

}  // namespace

TEST(ProcScheduler, GroundOnlyEnergy) {
  auto inst = base_instance();
  inst.ground = compute::cloud_cpu();
  const std::vector<double> x{1.0};
  const double D = inst.frame_bits();
  const double e = total_energy(inst, x, optimal_frequencies(inst, x));
  const double hand = 3 * 60.0 * D / 10e9 + 10.0 * D / 2.3e9 + hand_processing(*inst.ground, 400, 10.0);
  EXPECT_NEAR(e, hand, 1e-9 * hand);
  const auto plan = solve(inst);
  ASSERT_EQ(plan.x.size(), 1u);
  EXPECT_DOUBLE_EQ(plan.x[0], 1.0);
}

TEST(ProcScheduler, AdjacentEdgeNodeEnergy) {
  auto inst = base_instance();
  inst.edge.push_back({compute::jetson_agx(), 1});
  inst.n_img = 200;
  inst.dl_sat_gather = 1;
  const std::vector<double> x{1.0};
  const double D = inst.frame_bits();
  const auto b = energy_breakdown(inst, x, optimal_frequencies(inst, x));
  EXPECT_NEAR(b.scatter_isl, 60.0 * D / 10e9, 1e-12);
  EXPECT_EQ(b.gather_isl, 0.0);
  EXPECT_NEAR(b.gather_dl, 10.0 * D / 2346.0 / 2.3e9, 1e-15);
  EXPECT_NEAR(b.processing_edge, hand_processing(compute::jetson_agx(), 200, 10.0), 1e-9);
  const auto ev = oracle::evaluate_allocation(inst, x);
  EXPECT_TRUE(ev.feasible);
  EXPECT_NEAR(ev.energy, b.total(), 1e-9 * b.total());
}

TEST(ProcScheduler, DelayTerms) {
  auto inst = base_instance();
  inst.edge.push_back({compute::jetson_agx(), 1});
  inst.n_img = 200;
  inst.workload.rho = 1e12;
  const std::vector<double> x{1.0};
  const auto f = optimal_frequencies(inst, x);
  const double prop = 2 * inst.d_isl_m / 299792458.0 + inst.d_eg_gather_m / 299792458.0;
  EXPECT_NEAR(t_delay(inst, x, f), prop, 1e-9);

  // Overloaded by one second.
  inst.n_img = 11.0 / compute::mean_exec_time(compute::jetson_agx(), 1.3e9, inst.workload);
  EXPECT_GE(t_delay(inst, x, {1.3e9}), 1.0);
}

TEST(ProcScheduler, NoEdgeForcesGround) {
  auto inst = base_instance();
  inst.ground = compute::cloud_cpu();
  EXPECT_DOUBLE_EQ(solve(inst).x.back(), 1.0);
}

TEST(ProcScheduler, InfeasibleNamesConstraint) {
  auto inst = base_instance();
  inst.edge.push_back({compute::satellite_cpu(), 1});
  inst.n_img = 2601;
  try {
    solve(inst);
    FAIL() << "expected infeasible";
  } catch (const InfeasibleAllocationError& e) {
    ASSERT_FALSE(e.violated().empty());
    EXPECT_EQ(e.violated()[0], "c:proc");
  }
}

TEST(ProcScheduler, SingleEdgeMatchesGoldenSection) {
  auto inst = base_instance();
  inst.edge.push_back({compute::jetson_agx(), 1});
  inst.ground = compute::cloud_cpu();
  inst.n_img = 800;
  inst.rate_scatter_bps = 3e8;
  const double cap = processing_caps(inst)[0];
  auto energy = [&](double x) {
    const auto ev = oracle::evaluate_allocation(inst, {x, 1.0 - x}, 1e-9);
    return ev.feasible ? ev.energy : std::numeric_limits<double>::infinity();
  };
  double a = std::max(0.0, 1.0 - processing_caps(inst)[1]), b = cap;
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int i = 0; i < 200; ++i) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (energy(c) < energy(d)) b = d;
    else a = c;
  }
  const double x_ref = 0.5 * (a + b);
  const auto plan = solve(inst);
  EXPECT_NEAR(plan.x[0], x_ref, 1e-4);
  EXPECT_LE(plan.predicted_energy, energy(x_ref) * (1 + 1e-6));
}

TEST(ProcScheduler, WithinOnePercentOfGrid) {
  int compared = 0;
  for (std::uint64_t seed = 1; compared < 50 && seed < 500; ++seed) {
    const auto inst = testdata::random_psch_instance(seed);
    const auto grid = oracle::grid_search_psch(inst, 0.01);
    AllocationPlan plan;
    bool solved = true;
    try {
      plan = solve(inst);
    } catch (const InfeasibleAllocationError&) {
      solved = false;
    }
    if (!grid.feasible) {
      if (solved) EXPECT_TRUE(oracle::evaluate_allocation(inst, plan.x, 1e-6).feasible) << seed;
      continue;
    }
    ASSERT_TRUE(solved) << "seed " << seed << " grid energy " << grid.energy;
    const auto ev = oracle::evaluate_allocation(inst, plan.x, 1e-6);
    EXPECT_TRUE(ev.feasible) << "seed " << seed;
    EXPECT_LE(ev.energy, grid.energy * 1.01) << "seed " << seed;
    EXPECT_NEAR(ev.energy, plan.predicted_energy, 1e-6 * ev.energy);
    ++compared;
  }
  EXPECT_EQ(compared, 50);
}

TEST(ProcScheduler, SubstitutedEnergyIsConvex) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int checked = 0;
  for (std::uint64_t k = 0; checked < 10000; ++k) {
    const auto inst = testdata::random_psch_instance(1000 + k % 50);
    const auto caps = processing_caps(inst);
    const std::size_t P = caps.size();
    auto draw = [&] {
      std::vector<double> x(P);
      for (std::size_t p = 0; p < P; ++p) x[p] = U(rng) * caps[p];
      return x;
    };
    const auto a = draw(), b = draw();
    std::vector<double> m(P);
    for (std::size_t p = 0; p < P; ++p) m[p] = 0.5 * (a[p] + b[p]);
    const double ea = substituted_energy(inst, a), eb = substituted_energy(inst, b), em = substituted_energy(inst, m);
    EXPECT_LE(em, 0.5 * (ea + eb) * (1 + 1e-12) + 1e-12);
    ++checked;
  }
}

TEST(ProcScheduler, MaxSupportedLoad) {
  const compute::WorkloadSpec w;
  auto fleet = [](compute::PlatformSpec p) {
    std::vector<compute::PlatformSpec> v(23, p);
    v.push_back(compute::cloud_cpu());
    return v;
  };
  EXPECT_NEAR(max_supported_load(fleet(compute::satellite_cpu()), w, 10.0).fps, 186.5, 0.5);
  EXPECT_LT(max_supported_load(fleet(compute::satellite_cpu()), w, 10.0).fps, 200.0);
  EXPECT_NEAR(max_supported_load(fleet(compute::jetson_nano()), w, 10.0).fps, 458.7, 0.5);
  EXPECT_NEAR(max_supported_load(fleet(compute::jetson_agx()), w, 10.0).fps, 820.0, 0.02 * 820.0);
  EXPECT_NEAR(max_supported_load({compute::cloud_cpu()}, w, 10.0).fps, 62.377, 0.06);
}
