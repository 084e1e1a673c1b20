#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "orbitedge/errors.hpp"
#include "orbitedge/oracle.hpp"

namespace orbitedge::oracle {

namespace {

constexpr double kTol = 1e-9;

struct Branch {
  double upto;  // inclusive upper bound on the angle
  double base;
  double divisor;  // 0: constant
};

constexpr Branch kSlew[] = {
    {10.0, 11.66, 0.0}, {30.0, 5.0, 1.5}, {60.0, 10.0, 2.0}, {90.0, 16.0, 2.5},
    {std::numeric_limits<double>::infinity(), 22.0, 3.0},
};

struct Label {
  double profit;
  double energy;
};

// Adds l to a Pareto set (max profit, min energy). Returns false if dominated.
bool add_label(std::vector<Label>& set, const Label& l) {
  for (const auto& o : set)
    if (o.profit >= l.profit - kTol && o.energy <= l.energy + kTol) return false;
  std::erase_if(set, [&](const Label& o) { return l.profit >= o.profit - kTol && l.energy <= o.energy + kTol; });
  set.push_back(l);
  return true;
}

}  // namespace

double slew_seconds(double alpha) {
  for (const auto& b : kSlew)
    if (alpha <= b.upto) return b.divisor == 0.0 ? b.base : b.base + alpha / b.divisor;
  return 0.0;
}

double slew_seconds(const acquisition::Attitude& a, const acquisition::Attitude& b) {
  const double d[3] = {a.roll_deg - b.roll_deg, a.pitch_deg - b.pitch_deg, a.yaw_deg - b.yaw_deg};
  return slew_seconds(std::fabs(d[0]) + std::fabs(d[1]) + std::fabs(d[2]));
}

std::vector<std::string> check_schedule(const obs::SchedulingInstance& inst, const obs::ObservationSchedule& s) {
  std::vector<std::string> bad;
  std::map<int, const acquisition::ObservationWindow*> by_id;
  for (const auto& w : inst.otws) by_id[w.id] = &w;
  std::set<int> targets;
  double profit = 0.0;
  for (const auto& seq : s.sequences) {
    double energy = 0.0;
    for (std::size_t i = 0; i < seq.items.size(); ++i) {
      const auto& w = seq.items[i].otw;
      const std::string tag = "otw " + std::to_string(w.id);
      auto it = by_id.find(w.id);
      if (it == by_id.end() || it->second->target_id != w.target_id || it->second->sat_id != w.sat_id ||
          it->second->timestamp != w.timestamp) {
        bad.push_back(tag + ": not in the instance");
        continue;
      }
      if (w.sat_id != seq.sat_id) bad.push_back(tag + ": on the wrong satellite");
      if (w.timestamp < w.vtw_start - kTol || w.timestamp > w.vtw_end + kTol) bad.push_back(tag + ": outside its window");
      if (inst.sth_end > inst.sth_start && (w.timestamp < inst.sth_start - kTol || w.timestamp > inst.sth_end + kTol))
        bad.push_back(tag + ": outside the horizon");
      if (!targets.insert(w.target_id).second) bad.push_back(tag + ": target visited twice");
      profit += w.profit;
      if (i > 0) {
        const auto& prev = seq.items[i - 1].otw;
        const double dt = slew_seconds(prev.attitude, w.attitude);
        if (w.timestamp < prev.timestamp + dt - kTol) bad.push_back(tag + ": slew from previous does not fit");
        energy += inst.agility.p_man_w * dt;
      }
    }
    if (energy > inst.agility.e_max_j + kTol)
      bad.push_back("satellite " + std::to_string(seq.sat_id) + ": maneuver energy over budget");
  }
  if (std::fabs(profit - s.total_profit) > 1e-6) bad.push_back("reported profit does not match the OTWs");
  return bad;
}

double enumerate_aeossp(const obs::SchedulingInstance& inst) {
  std::map<int, int> tindex;
  std::map<int, int> per_target;
  for (const auto& w : inst.otws) {
    if (!tindex.count(w.target_id)) {
      const int k = static_cast<int>(tindex.size());
      tindex[w.target_id] = k;
    }
    ++per_target[w.target_id];
  }
  const int K = static_cast<int>(tindex.size());
  if (K > 8) throw SizeLimitError("enumeration oracle refuses more than 8 targets");
  for (const auto& [t, n] : per_target)
    if (n > 6) throw SizeLimitError("enumeration oracle refuses more than 6 OTWs per target");
  if (K == 0) return 0.0;

  std::set<int> sats;
  for (const auto& w : inst.otws) sats.insert(w.sat_id);
  const int full = (1 << K) - 1;
  const double neg = -std::numeric_limits<double>::infinity();
  const double emax = inst.agility.e_max_j, pman = inst.agility.p_man_w;

  std::vector<double> combined(static_cast<std::size_t>(full) + 1, neg);
  combined[0] = 0.0;
  for (int s : sats) {
    std::vector<const acquisition::ObservationWindow*> w;
    for (const auto& o : inst.otws)
      if (o.sat_id == s) w.push_back(&o);
    const std::size_t n = w.size();
    // dp[mask * n + last]
    std::vector<std::vector<Label>> dp((static_cast<std::size_t>(full) + 1) * n);
    for (std::size_t i = 0; i < n; ++i) {
      const int bit = 1 << tindex[w[i]->target_id];
      add_label(dp[bit * n + i], {w[i]->profit, 0.0});
    }
    std::vector<double> best(static_cast<std::size_t>(full) + 1, neg);
    best[0] = 0.0;
    for (int mask = 1; mask <= full; ++mask) {
      for (std::size_t a = 0; a < n; ++a) {
        const auto& labels = dp[mask * n + a];
        if (labels.empty()) continue;
        for (const auto& l : labels) best[mask] = std::max(best[mask], l.profit);
        for (std::size_t b = 0; b < n; ++b) {
          const int bit = 1 << tindex[w[b]->target_id];
          if (mask & bit) continue;
          const double dt = slew_seconds(w[a]->attitude, w[b]->attitude);
          if (w[b]->timestamp < w[a]->timestamp + dt - kTol) continue;
          for (const auto& l : labels) {
            const double e = l.energy + pman * dt;
            if (e > emax + kTol) continue;
            add_label(dp[(mask | bit) * n + b], {l.profit + w[b]->profit, e});
          }
        }
      }
    }
    // Merge with the satellites seen so far: split the visited set.
    std::vector<double> next(static_cast<std::size_t>(full) + 1, neg);
    for (int m = 0; m <= full; ++m) {
      for (int a = m;; a = (a - 1) & m) {
        if (best[a] > neg && combined[m ^ a] > neg) next[m] = std::max(next[m], best[a] + combined[m ^ a]);
        if (a == 0) break;
      }
    }
    combined = std::move(next);
  }
  return *std::max_element(combined.begin(), combined.end());
}

obs::SchedulingInstance random_small_instance(std::uint64_t seed, int max_targets, int max_otws, int n_sats) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  auto pick = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
  obs::SchedulingInstance inst;
  inst.agility.e_max_j = uni(40.0, 160.0);
  inst.agility.p_man_w = 2.0;
  inst.sth_start = 0.0;
  inst.sth_end = 200.0;
  const int sats = pick(1, std::max(1, n_sats));
  for (int s = 0; s < sats; ++s) inst.satellites.push_back(s);
  const int K = pick(1, max_targets);
  int id = 0;
  for (int t = 0; t < K; ++t) {
    const int m = pick(1, max_otws);
    const int sat = pick(0, sats - 1);
    const double centre = uni(10.0, 190.0);
    const double roll = uni(-40.0, 40.0);
    for (int j = 0; j < m; ++j) {
      acquisition::ObservationWindow w;
      w.id = id++;
      w.sat_id = pick(0, 3) == 0 ? pick(0, sats - 1) : sat;
      w.target_id = t;
      w.window_index = 0;
      w.timestamp = std::clamp(centre + 10.0 * (j - m / 2) + uni(-2.0, 2.0), 0.0, 200.0);
      w.attitude = {roll + uni(-5.0, 5.0), uni(-40.0, 40.0), 0.0};
      w.profit = uni(0.3, 1.0);
      w.vtw_start = 0.0;
      w.vtw_end = 200.0;
      inst.otws.push_back(w);
    }
  }
  inst.normalize();
  return inst;
}

}  // namespace orbitedge::oracle
