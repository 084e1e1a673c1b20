#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "orbitedge/compute.hpp"
#include "orbitedge/network.hpp"

// Splits one observation's frame across edge satellites and the ground
// segment to minimize energy, with each processor clocked just fast enough
// to finish its share within the slot.
namespace orbitedge::proc {

struct EdgeProcessor {
  compute::PlatformSpec platform;
  int ring_index = 0;
};

// How the downlink budget is shared between the raw (ground-processed) share
// and the compressed edge output.
enum class DownlinkConvention {
  kSplit,   // raw share at the scatter slot's rate, compressed at the gather slot's
  kShared,  // one budget at the gather slot's rate, as a single constraint
};

struct ProcessingInstance {
  std::vector<EdgeProcessor> edge;
  std::optional<compute::PlatformSpec> ground;
  compute::WorkloadSpec workload;
  double n_img = 2601;
  double img_bits = 788'513.0;
  double t_slot = 10.0;

  int ring_size = 23;
  int source = 0;               // ring index where the frame enters the edge layer
  int source_extra_hops = 0;    // 1 when the observer is not itself an edge node
  double source_extra_range_m = 0.0;
  double d_isl_m = 1.9031e6;

  // Downlink satellite, rate and slant range at the scatter slot (k) and the
  // gather slot (k+2). A negative satellite means no contact.
  int dl_sat_scatter = -1;
  double rate_scatter_bps = 0.0;
  double d_eg_scatter_m = 0.0;
  int dl_sat_gather = -1;
  double rate_gather_bps = 0.0;
  double d_eg_gather_m = 0.0;

  network::LinkSpec link;
  DownlinkConvention convention = DownlinkConvention::kSplit;

  void validate() const;
  double frame_bits() const { return n_img * img_bits; }
  // Edge processors first, then ground if present.
  std::size_t processor_count() const { return edge.size() + (ground ? 1 : 0); }
  const compute::PlatformSpec& platform(std::size_t i) const;
  bool is_ground(std::size_t i) const { return ground && i == edge.size(); }
};

struct EnergyBreakdown {
  double scatter_isl = 0.0;
  double scatter_dl = 0.0;
  double processing_edge = 0.0;
  double processing_ground = 0.0;
  double gather_isl = 0.0;
  double gather_dl = 0.0;
  double total() const {
    return scatter_isl + scatter_dl + processing_edge + processing_ground + gather_isl + gather_dl;
  }
};

struct AllocationPlan {
  std::vector<double> x;  // per processor, edge first then ground
  std::vector<double> f;  // Hz, 0 for idle processors
  EnergyBreakdown energy;
  double predicted_energy = 0.0;
  double t_delay = 0.0;
  double kkt_residual = 0.0;
  std::vector<std::string> binding;
};

// Energy of an arbitrary allocation with given frequencies. Idle processors
// (x = 0) may carry f = 0.
EnergyBreakdown energy_breakdown(const ProcessingInstance& inst, const std::vector<double>& x,
                                 const std::vector<double>& f);
double total_energy(const ProcessingInstance& inst, const std::vector<double>& x, const std::vector<double>& f);
double t_delay(const ProcessingInstance& inst, const std::vector<double>& x, const std::vector<double>& f);

// Per-processor upper bound on x from the f_max processing constraint.
std::vector<double> processing_caps(const ProcessingInstance& inst);
// f* per processor for a given split (0 where x = 0).
std::vector<double> optimal_frequencies(const ProcessingInstance& inst, const std::vector<double>& x);
// Energy with f = f*(x); +inf when some share exceeds its cap.
double substituted_energy(const ProcessingInstance& inst, const std::vector<double>& x);

struct SolveOptions {
  int delay_iterations = 2;
  double tolerance = 1e-12;
};

// Throws InfeasibleAllocationError naming the violated constraints.
AllocationPlan solve(const ProcessingInstance& inst, const SolveOptions& opts = {});

struct LoadCapacity {
  double images_per_slot = 0.0;
  double fps = 0.0;
};

LoadCapacity max_supported_load(const std::vector<compute::PlatformSpec>& platforms,
                                const compute::WorkloadSpec& w, double t_slot);

nlohmann::json plan_to_json(const ProcessingInstance& inst, const AllocationPlan& plan);

}  // namespace orbitedge::proc
