#include "orbitedge/obs_scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "orbitedge/errors.hpp"
#include "orbitedge/rng.hpp"

namespace orbitedge::obs {

namespace {

constexpr double kEps = 1e-9;
// Smallest possible slew; no two OTWs of one satellite can be closer.
constexpr double kMinTransition = 11.66;

bool otw_order(const ObservationWindow& a, const ObservationWindow& b) {
  if (a.sat_id != b.sat_id) return a.sat_id < b.sat_id;
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  return a.id < b.id;
}

// Ids of all OTWs in the schedule, sorted by (timestamp, id).
std::vector<int> ordered_ids(const ObservationSchedule& s) {
  std::vector<int> ids;
  for (const auto& w : s.flattened()) ids.push_back(w.id);
  return ids;
}

}  // namespace

void SchedulingInstance::normalize() {
  std::vector<std::string> problems;
  std::sort(otws.begin(), otws.end(), otw_order);
  std::set<int> ids;
  for (const auto& w : otws) {
    if (!ids.insert(w.id).second) problems.push_back("duplicate OTW id " + std::to_string(w.id));
    if (w.timestamp < w.vtw_start - kEps || w.timestamp > w.vtw_end + kEps)
      problems.push_back("OTW " + std::to_string(w.id) + " outside its window");
    if (sth_end > sth_start && (w.timestamp < sth_start - kEps || w.timestamp > sth_end + kEps))
      problems.push_back("OTW " + std::to_string(w.id) + " outside the horizon");
    if (!(w.profit >= 0.0) || w.profit > 1.0 + kEps)
      problems.push_back("OTW " + std::to_string(w.id) + " profit out of range");
  }
  if (!problems.empty()) throw ValidationError(problems);
  if (satellites.empty()) {
    for (const auto& w : otws)
      if (satellites.empty() || satellites.back() != w.sat_id) satellites.push_back(w.sat_id);
  }
  std::sort(satellites.begin(), satellites.end());
  satellites.erase(std::unique(satellites.begin(), satellites.end()), satellites.end());
  agility.validate();
}

std::vector<int> SchedulingInstance::target_ids() const {
  std::vector<int> t;
  t.reserve(otws.size());
  for (const auto& w : otws) t.push_back(w.target_id);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

std::vector<ObservationWindow> ObservationSchedule::flattened() const {
  std::vector<ObservationWindow> out;
  for (const auto& seq : sequences)
    for (const auto& it : seq.items) out.push_back(it.otw);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.id < b.id;
  });
  return out;
}

std::vector<std::pair<int, int>> ObservationSchedule::successor_pairs() const {
  std::vector<std::pair<int, int>> z;
  for (const auto& seq : sequences)
    for (std::size_t i = 1; i < seq.items.size(); ++i)
      z.emplace_back(seq.items[i - 1].otw.id, seq.items[i].otw.id);
  return z;
}

std::size_t ObservationSchedule::size() const {
  std::size_t n = 0;
  for (const auto& seq : sequences) n += seq.items.size();
  return n;
}

double ObservationSchedule::completion_time() const {
  double t = 0.0;
  for (const auto& seq : sequences)
    if (!seq.items.empty()) t = std::max(t, seq.completion_time());
  return t;
}

ObservationSchedule make_schedule(const SchedulingInstance& inst,
                                  const std::vector<std::vector<ObservationWindow>>& chains) {
  ObservationSchedule s;
  for (const auto& chain : chains) {
    if (chain.empty()) continue;
    SatelliteSequence seq;
    seq.sat_id = chain.front().sat_id;
    for (std::size_t i = 0; i < chain.size(); ++i) {
      ScheduledObservation item;
      item.otw = chain[i];
      if (i > 0) {
        item.transition_s = acquisition::transition_time(chain[i - 1], chain[i]);
        item.maneuver_energy_j = acquisition::maneuver_energy(item.transition_s, inst.agility);
      }
      seq.maneuver_energy_j += item.maneuver_energy_j;
      s.total_profit += item.otw.profit;
      seq.items.push_back(item);
    }
    s.maneuver_energy_j += seq.maneuver_energy_j;
    s.sequences.push_back(std::move(seq));
  }
  std::sort(s.sequences.begin(), s.sequences.end(),
            [](const auto& a, const auto& b) { return a.sat_id < b.sat_id; });
  return s;
}

bool better_schedule(const ObservationSchedule& a, const ObservationSchedule& b) {
  if (a.total_profit > b.total_profit + kEps) return true;
  if (a.total_profit < b.total_profit - kEps) return false;
  if (a.completion_time() < b.completion_time() - kEps) return true;
  if (a.completion_time() > b.completion_time() + kEps) return false;
  return ordered_ids(a) < ordered_ids(b);
}

// ---------------------------------------------------------------------------
// Shared helpers: one satellite's OTWs in time order.

namespace {

struct SatView {
  int sat_id = 0;
  std::vector<const ObservationWindow*> w;  // sorted by (tau, id)
};

std::vector<SatView> split_by_satellite(const SchedulingInstance& inst) {
  std::map<int, SatView> m;
  for (int s : inst.satellites) m[s].sat_id = s;
  for (const auto& w : inst.otws) {
    auto& v = m[w.sat_id];
    v.sat_id = w.sat_id;
    v.w.push_back(&w);
  }
  std::vector<SatView> out;
  for (auto& [id, v] : m) {
    std::sort(v.w.begin(), v.w.end(), [](auto* a, auto* b) {
      if (a->timestamp != b->timestamp) return a->timestamp < b->timestamp;
      return a->id < b->id;
    });
    out.push_back(std::move(v));
  }
  return out;
}

// Greedy insertion into per-satellite chains. Used by the GA decoder and to
// seed the exact solver.
class ChainBuilder {
 public:
  explicit ChainBuilder(const SchedulingInstance& inst) : inst_(inst) {
    for (int s : inst.satellites) chains_[s];
  }

  bool try_insert(const ObservationWindow& w) {
    if (used_.count(w.target_id)) return false;
    auto& c = chains_[w.sat_id];
    auto pos = std::lower_bound(c.begin(), c.end(), &w, [](auto* a, auto* b) {
      if (a->timestamp != b->timestamp) return a->timestamp < b->timestamp;
      return a->id < b->id;
    });
    const ObservationWindow* pred = pos == c.begin() ? nullptr : *(pos - 1);
    const ObservationWindow* succ = pos == c.end() ? nullptr : *pos;
    double de = 0.0;
    if (pred) {
      const double dt = acquisition::transition_time(*pred, w);
      if (w.timestamp < pred->timestamp + dt - kEps) return false;
      de += dt;
    }
    if (succ) {
      const double dt = acquisition::transition_time(w, *succ);
      if (succ->timestamp < w.timestamp + dt - kEps) return false;
      de += dt;
    }
    if (pred && succ) de -= acquisition::transition_time(*pred, *succ);
    double& e = energy_[w.sat_id];
    const double extra = de * inst_.agility.p_man_w;
    if (e + extra > inst_.agility.e_max_j + kEps) return false;
    e += extra;
    c.insert(pos, &w);
    used_.insert(w.target_id);
    profit_ += w.profit;
    return true;
  }

  double profit() const { return profit_; }

  ObservationSchedule build() const {
    std::vector<std::vector<ObservationWindow>> chains;
    for (const auto& [s, c] : chains_) {
      std::vector<ObservationWindow> v;
      for (auto* p : c) v.push_back(*p);
      chains.push_back(std::move(v));
    }
    return make_schedule(inst_, chains);
  }

 private:
  const SchedulingInstance& inst_;
  std::map<int, std::vector<const ObservationWindow*>> chains_;
  std::map<int, double> energy_;
  std::set<int> used_;
  double profit_ = 0.0;
};

ObservationSchedule greedy_by_profit(const SchedulingInstance& inst) {
  std::vector<const ObservationWindow*> order;
  for (const auto& w : inst.otws) order.push_back(&w);
  std::stable_sort(order.begin(), order.end(),
                   [](auto* a, auto* b) { return a->profit > b->profit; });
  ChainBuilder b(inst);
  for (auto* w : order) b.try_insert(*w);
  return b.build();
}

// ---------------------------------------------------------------------------
// Exact single-satellite search.
//
// Labels are partial chains ending at an OTW. A label keeps the targets it has
// visited that still have later OTWs ("open" targets); closed targets cannot
// recur, so they are dropped from the state. Dominance: more profit, less
// energy, and a subset of open targets.

class ChainSearch {
 public:
  ChainSearch(const SatView& sat, const AgilitySpec& ag, const std::vector<char>& allowed_target,
              const std::vector<int>& target_index, std::size_t label_budget)
      : ag_(ag), budget_(label_budget) {
    for (auto* w : sat.w)
      if (allowed_target[target_index[w->target_id]]) nodes_.push_back(w);
    n_ = nodes_.size();
    tgt_.resize(n_);
    std::map<int, int> local;
    for (std::size_t i = 0; i < n_; ++i) {
      auto [it, fresh] = local.emplace(nodes_[i]->target_id, static_cast<int>(local.size()));
      tgt_[i] = it->second;
    }
    n_targets_ = local.size();
    last_tau_.assign(n_targets_, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n_; ++i)
      last_tau_[tgt_[i]] = std::max(last_tau_[tgt_[i]], nodes_[i]->timestamp);
    build_bounds();
  }

  // Best chain with profit above `threshold`, or empty with found=false.
  struct Result {
    bool found = false;
    double profit = 0.0;
    std::vector<const ObservationWindow*> chain;
  };

  Result run(double threshold) {
    if (n_ == 0) return Result{};
    // A narrow beam first: a strong incumbent makes the exact pass cheap.
    for (std::size_t beam : {std::size_t{16}, std::size_t{128}, std::size_t{1024}}) {
      const Result warm = search(threshold, beam);
        if (warm.found) threshold = std::max(threshold, warm.profit - 2 * kEps);
    }
    return search(threshold, 0);
  }

  std::size_t labels_created() const { return created_; }

 private:

  // beam == 0: exact. Otherwise only the `beam` labels with the best
  // optimistic value are extended at each node.
  Result search(double threshold, std::size_t beam) {
    Result r;
    // The repaired Lagrangian path is feasible, so a chain at least that good
    // exists and equal-profit labels are kept.
    incumbent_ = std::max(threshold, heuristic_profit_ - 2 * kEps);
    labels_.clear();
    pool_.clear();
    at_.assign(n_, {});
    best_ = kNone;

    for (std::size_t v = 0; v < n_; ++v) {
      // Start a chain at v.
      std::vector<int> set;
      if (last_tau_[tgt_[v]] >= nodes_[v]->timestamp + kMinTransition - kEps) set.push_back(tgt_[v]);
      add_label(v, nodes_[v]->profit, 0.0, kNone, set);

      auto& here = at_[v];
      if (beam > 0 && here.size() > beam) {
        std::vector<std::pair<double, std::uint32_t>> live;
        for (auto id : here)
          if (id != kDead) live.push_back({-(labels_[id].profit + bound(v, labels_[id])), id});
        if (live.size() > beam) {
          std::stable_sort(live.begin(), live.end());
          here.clear();
          for (std::size_t i = 0; i < beam; ++i) here.push_back(live[i].second);
        }
      }
      for (std::size_t li = 0; li < here.size(); ++li) {
        const std::uint32_t lid = here[li];
        if (lid == kDead) continue;
        const Label L = labels_[lid];
        if (L.profit + bound(v, L) < incumbent_ - kEps) continue;
        for (const auto& [u, de] : succ_[v]) {
          const int tu = tgt_[u];
          if (in_set(L, tu)) continue;
          const double e = L.energy + de;
          if (e > ag_.e_max_j + kEps) continue;
          const double p = L.profit + nodes_[u]->profit;
          if (p + bound(u, e, 0.0) < incumbent_ - kEps) continue;
          const double tau_u = nodes_[u]->timestamp;
          set.clear();
          for (std::uint16_t k = 0; k < L.len; ++k) {
            const int t = pool_[L.off + k];
            if (last_tau_[t] >= tau_u + kMinTransition - kEps) set.push_back(t);
          }
          if (last_tau_[tu] >= tau_u + kMinTransition - kEps) {
            set.insert(std::lower_bound(set.begin(), set.end(), tu), tu);
          }
          if (p + bound(u, e, open_lam(set.data(), set.size())) < incumbent_ - kEps) continue;
          add_label(u, p, e, lid, set);
        }
      }
      // Labels ending before v can never be extended by later nodes that are
      // not already reachable, so nothing else to do here.
    }

    if (best_ == kNone) return r;
    r.found = true;
    r.profit = labels_[best_].profit;
    r.chain = reconstruct(best_);
    return r;
  }

  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  static constexpr std::uint32_t kDead = kNone - 1;

  struct Label {
    double profit;
    double energy;
    std::uint32_t parent;
    std::uint32_t node;
    std::uint32_t off;
    std::uint16_t len;
  };

  bool in_set(const Label& L, int t) const {
    const int* b = pool_.data() + L.off;
    return std::binary_search(b, b + L.len, t);
  }

  // Profit a chain ending at v could still collect from targets in a but not
  // in b. Transition times are subadditive in the attitude change, so a
  // label that skips those targets can follow any completion of the other.
  double extra_open(std::size_t v, const int* a, std::size_t na, const int* b, std::size_t nb) const {
    double pen = 0.0;
    const double* row = &rem_[v * n_targets_];
    std::size_t j = 0;
    for (std::size_t i = 0; i < na; ++i) {
      while (j < nb && b[j] < a[i]) ++j;
      if (j < nb && b[j] == a[i]) continue;
      pen += row[a[i]];
    }
    return pen;
  }

  void add_label(std::size_t v, double p, double e, std::uint32_t parent, const std::vector<int>& set) {
    auto& here = at_[v];
    for (auto& k : here) {
      if (k == kDead) continue;
      const Label& K = labels_[k];
      if (K.energy > e + kEps) continue;
      const int* ks = pool_.data() + K.off;
      if (K.profit >= p + extra_open(v, ks, K.len, set.data(), set.size()) - kEps) return;
    }
    for (auto& k : here) {
      if (k == kDead) continue;
      const Label& K = labels_[k];
      if (e > K.energy + kEps) continue;
      const int* ks = pool_.data() + K.off;
      if (p >= K.profit + extra_open(v, set.data(), set.size(), ks, K.len) - kEps) k = kDead;
    }
    if (++created_ >= budget_) throw SizeLimitError("exact scheduler exceeded its label budget");
    Label L{p, e, parent, static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(pool_.size()),
            static_cast<std::uint16_t>(set.size())};
    pool_.insert(pool_.end(), set.begin(), set.end());
    const auto id = static_cast<std::uint32_t>(labels_.size());
    labels_.push_back(L);
    here.push_back(id);
    consider(id);
  }

  void consider(std::uint32_t id) {
    const Label& L = labels_[id];
    if (L.profit < incumbent_ - kEps) return;
    if (best_ == kNone || L.profit > labels_[best_].profit + kEps) {
      best_ = id;
    } else if (L.profit >= labels_[best_].profit - kEps) {
      // Tie: earlier completion, then lexicographic ids.
      const double ta = nodes_[L.node]->timestamp;
      const double tb = nodes_[labels_[best_].node]->timestamp;
      if (ta < tb - kEps || (std::abs(ta - tb) <= kEps && ids(id) < ids(best_))) best_ = id;
    }
    incumbent_ = std::max(incumbent_, labels_[best_].profit);
  }

  std::vector<const ObservationWindow*> reconstruct(std::uint32_t id) const {
    std::vector<const ObservationWindow*> c;
    for (std::uint32_t k = id; k != kNone; k = labels_[k].parent) c.push_back(nodes_[labels_[k].node]);
    std::reverse(c.begin(), c.end());
    return c;
  }

  std::vector<int> ids(std::uint32_t id) const {
    std::vector<int> v;
    for (auto* w : reconstruct(id)) v.push_back(w->id);
    return v;
  }

  // Upper bound on the profit still collectable after node v with energy e
  // used: the k best per-target profits among targets with a later OTW.
  void build_bounds() {
    best_after_.assign(n_, {});
    std::vector<double> best(n_targets_);
    for (std::size_t v = 0; v < n_; ++v) {
      std::fill(best.begin(), best.end(), 0.0);
      const double t0 = nodes_[v]->timestamp + kMinTransition - kEps;
      for (std::size_t u = v + 1; u < n_; ++u)
        if (nodes_[u]->timestamp >= t0) best[tgt_[u]] = std::max(best[tgt_[u]], nodes_[u]->profit);
      best[tgt_[v]] = 0.0;
      std::vector<double> sorted;
      for (double b : best)
        if (b > 0.0) sorted.push_back(b);
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      std::vector<double> prefix(sorted.size() + 1, 0.0);
      for (std::size_t i = 0; i < sorted.size(); ++i) prefix[i + 1] = prefix[i] + sorted[i];
      best_after_[v] = std::move(prefix);
    }
    horizon_end_ = n_ ? nodes_.back()->timestamp : 0.0;

    // rem_[v][t]: best profit of target t among OTWs a chain at v can reach.
    rem_.assign(n_ * n_targets_, 0.0);
    std::vector<double> suffix(n_targets_, 0.0);
    std::size_t u = n_;
    for (std::size_t v = n_; v-- > 0;) {
      const double t0 = nodes_[v]->timestamp + kMinTransition - kEps;
      while (u > v + 1 && nodes_[u - 1]->timestamp >= t0) {
        --u;
        suffix[tgt_[u]] = std::max(suffix[tgt_[u]], nodes_[u]->profit);
      }
      std::copy(suffix.begin(), suffix.end(), rem_.begin() + static_cast<std::ptrdiff_t>(v * n_targets_));
    }

    build_lagrangian();
  }

  // Lagrangian bound: target uniqueness (multipliers lam) and the energy
  // budget (mu) are priced into the profits. For any lam, mu >= 0 the longest
  // path under reduced profits plus the multiplier terms bounds the rest of
  // the chain. Multipliers come from a subgradient descent; the repaired
  // paths it visits give a starting incumbent.
  void build_lagrangian() {
    const double E = ag_.e_max_j;
    succ_.assign(n_, {});
    for (std::size_t v = 0; v < n_; ++v) {
      const double tv = nodes_[v]->timestamp;
      for (std::size_t u = v + 1; u < n_; ++u) {
        if (tgt_[u] == tgt_[v] || nodes_[u]->timestamp < tv + kMinTransition - kEps) continue;
        const double dt = acquisition::transition_time(*nodes_[v], *nodes_[u]);
        if (nodes_[u]->timestamp < tv + dt - kEps || dt * ag_.p_man_w > E + kEps) continue;
        succ_[v].push_back({static_cast<std::uint32_t>(u), dt * ag_.p_man_w});
      }
    }

    std::vector<double> lam(n_targets_, 0.0), best_lam = lam;
    double mu = 0.0, best_mu = 0.0, best_L = std::numeric_limits<double>::infinity();
    std::vector<double> cont(n_);
    std::vector<std::uint32_t> nxt(n_);
    std::vector<int> count(n_targets_);
    double step = 1.0;
    int stall = 0;

    auto solve = [&](const std::vector<double>& l, double m) {
      for (std::size_t v = n_; v-- > 0;) {
        cont[v] = 0.0;
        nxt[v] = kNone;
        for (const auto& [u, e] : succ_[v]) {
          const double val = nodes_[u]->profit - l[tgt_[u]] - m * e + cont[u];
          if (val > cont[v]) {
            cont[v] = val;
            nxt[v] = u;
          }
        }
      }
    };

    for (int it = 0; it < kLagrangeIters && n_ > 0; ++it) {
      solve(lam, mu);
      double L = std::accumulate(lam.begin(), lam.end(), 0.0) + mu * E;
      double top = 0.0;
      std::uint32_t start = kNone;
      for (std::size_t v = 0; v < n_; ++v) {
        const double val = nodes_[v]->profit - lam[tgt_[v]] + cont[v];
        if (val > top) {
          top = val;
          start = static_cast<std::uint32_t>(v);
        }
      }
      L += top;
      if (L < best_L - 1e-12) {
        best_L = L;
        best_lam = lam;
        best_mu = mu;
        stall = 0;
      } else if (++stall >= 10) {
        step *= 0.5;
        stall = 0;
      }

      std::fill(count.begin(), count.end(), 0);
      std::vector<std::uint32_t> path;
      double used = 0.0;
      for (std::uint32_t v = start; v != kNone; v = nxt[v]) {
        if (!path.empty()) used += edge_energy(path.back(), v);
        path.push_back(v);
        ++count[tgt_[v]];
      }
      repair(path);

      if (best_L - heuristic_profit_ < 1e-9 || step < 1e-4) break;
      double norm = 0.0;
      for (std::size_t t = 0; t < n_targets_; ++t) norm += (1.0 - count[t]) * (1.0 - count[t]);
      const double g_mu = E > 0.0 ? 1.0 - used / E : 0.0;
      norm += g_mu * g_mu;
      if (norm < 1e-12) break;
      const double s = step * (L - heuristic_profit_) / norm;
      for (std::size_t t = 0; t < n_targets_; ++t) lam[t] = std::max(0.0, lam[t] - s * (1.0 - count[t]));
      if (E > 0.0) mu = std::max(0.0, mu - s * g_mu / E);
    }

    solve(best_lam, best_mu);
    lag_cont_ = cont;
    lag_lam_ = best_lam;
    lag_mu_ = best_mu;
    // Multipliers of the targets that can still appear after v.
    lag_lam_after_.assign(n_, 0.0);
    std::vector<std::size_t> order(n_targets_);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return last_tau_[a] > last_tau_[b]; });
    double acc = 0.0;
    std::size_t k = 0;
    for (std::size_t v = n_; v-- > 0;) {
      const double t0 = nodes_[v]->timestamp + kMinTransition - kEps;
      while (k < order.size() && last_tau_[order[k]] >= t0) acc += best_lam[order[k++]];
      lag_lam_after_[v] = acc;
    }
  }

  double edge_energy(std::uint32_t v, std::uint32_t u) const {
    for (const auto& [w, e] : succ_[v])
      if (w == u) return e;
    return 0.0;
  }

  // Drops repeated targets and steps that break timing or energy, keeping the
  // best feasible chain seen so far.
  void repair(const std::vector<std::uint32_t>& path) {
    std::vector<std::uint32_t> kept;
    std::vector<char> seen(n_targets_, 0);
    double e = 0.0, p = 0.0;
    for (std::uint32_t v : path) {
      if (seen[tgt_[v]]) continue;
      if (!kept.empty()) {
        const auto* a = nodes_[kept.back()];
        const double dt = acquisition::transition_time(*a, *nodes_[v]);
        if (nodes_[v]->timestamp < a->timestamp + dt - kEps) continue;
        if (e + dt * ag_.p_man_w > ag_.e_max_j + kEps) continue;
        e += dt * ag_.p_man_w;
      }
      kept.push_back(v);
      seen[tgt_[v]] = 1;
      p += nodes_[v]->profit;
    }
    heuristic_profit_ = std::max(heuristic_profit_, p);
  }

  // Open targets cannot recur, so their multipliers drop out of the bound.
  double open_lam(const int* set, std::size_t n) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += lag_lam_[set[i]];
    return acc;
  }

  double bound(std::size_t v, const Label& L) const {
    return bound(v, L.energy, open_lam(pool_.data() + L.off, L.len));
  }

  double bound(std::size_t v, double energy, double open) const {
    const auto& pre = best_after_[v];
    const double min_e = kMinTransition * ag_.p_man_w;
    const double by_energy = min_e > 0.0 ? std::floor((ag_.e_max_j - energy) / min_e + 1e-9) : 1e18;
    const double by_time = std::floor((horizon_end_ - nodes_[v]->timestamp) / kMinTransition + 1e-9);
    double k = std::min({by_energy, by_time, static_cast<double>(pre.size() - 1)});
    if (k <= 0) return 0.0;
    const auto kk = static_cast<std::size_t>(k);
    const double lag = lag_cont_[v] + lag_lam_after_[v] - open + lag_mu_ * std::max(0.0, ag_.e_max_j - energy);
    return std::min(pre[kk], lag);
  }

  const AgilitySpec& ag_;
  std::size_t budget_;
  std::vector<const ObservationWindow*> nodes_;
  std::size_t n_ = 0;
  std::vector<int> tgt_;
  std::size_t n_targets_ = 0;
  std::vector<double> last_tau_;
  std::vector<std::vector<double>> best_after_;
  double horizon_end_ = 0.0;
  static constexpr int kLagrangeIters = 500;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> succ_;
  std::vector<double> lag_cont_;
  std::vector<double> rem_;
  std::vector<double> lag_lam_;
  std::vector<double> lag_lam_after_;
  double lag_mu_ = 0.0;
  double heuristic_profit_ = 0.0;
  std::size_t created_ = 0;

  std::vector<Label> labels_;
  std::vector<int> pool_;
  std::vector<std::vector<std::uint32_t>> at_;
  std::uint32_t best_ = kNone;
  double incumbent_ = 0.0;
};

}  // namespace

// ---------------------------------------------------------------------------
// Exact multi-satellite solver: best-first branch and bound over the targets
// two or more satellites want. Each node solves the satellites independently
// under per-target satellite restrictions.

ObservationSchedule solve_exact(const SchedulingInstance& inst_in, const ExactOptions& opts) {
  SchedulingInstance inst = inst_in;
  inst.normalize();
  const auto targets = inst.target_ids();
  if (targets.size() > opts.max_targets || inst.otws.size() > opts.max_otws)
    throw SizeLimitError("instance too large for the exact scheduler (" + std::to_string(targets.size()) +
                         " targets, " + std::to_string(inst.otws.size()) + " OTWs)");
  if (inst.otws.empty()) return ObservationSchedule{};

  const auto sats = split_by_satellite(inst);
  const std::size_t S = sats.size();
  int max_tid = 0;
  for (int t : targets) max_tid = std::max(max_tid, t);
  std::vector<int> tindex(static_cast<std::size_t>(max_tid) + 1, -1);
  for (std::size_t i = 0; i < targets.size(); ++i) tindex[targets[i]] = static_cast<int>(i);

  // allowed[t][s]: satellite s may take target t.
  using Mask = std::vector<std::vector<char>>;
  struct Node {
    Mask allowed;
    std::vector<std::vector<const ObservationWindow*>> chains;
    std::vector<double> profits;
    double bound = 0.0;
    std::size_t seq = 0;
  };

  auto to_schedule = [&](const std::vector<std::vector<const ObservationWindow*>>& chains) {
    std::vector<std::vector<ObservationWindow>> c;
    for (const auto& ch : chains) {
      std::vector<ObservationWindow> v;
      for (auto* w : ch) v.push_back(*w);
      c.push_back(std::move(v));
    }
    return make_schedule(inst, c);
  };

  ObservationSchedule incumbent = greedy_by_profit(inst);
  std::size_t labels_used = 0;

  auto solve_sat = [&](std::size_t s, const Mask& allowed, double threshold, bool& found) {
    std::vector<char> allow_t(targets.size());
    for (std::size_t t = 0; t < targets.size(); ++t) allow_t[t] = allowed[t][s];
    const std::size_t left = opts.max_labels > labels_used ? opts.max_labels - labels_used : 0;
    ChainSearch cs(sats[s], inst.agility, allow_t, tindex, left);
    auto r = cs.run(threshold);
    labels_used += cs.labels_created();
    found = r.found;
    return r;
  };

  // Single satellite: no branching needed.
  auto cmp = [](const Node& a, const Node& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.seq > b.seq;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> open(cmp);
  std::size_t seq = 0;

  // Root. The per-satellite searches share no threshold (they are bounds).
  {
    Node root;
    root.allowed.assign(targets.size(), std::vector<char>(S, 1));
    root.chains.resize(S);
    root.profits.assign(S, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
      bool found = false;
      double thr = 0.0;
      if (S == 1) thr = incumbent.total_profit - 2 * kEps;
      auto r = solve_sat(s, root.allowed, thr, found);
      if (found) {
        root.chains[s] = r.chain;
        root.profits[s] = r.profit;
      } else if (S == 1) {
        return incumbent;  // greedy already optimal
      }
    }
    root.bound = std::accumulate(root.profits.begin(), root.profits.end(), 0.0);
    root.seq = seq++;
    open.push(std::move(root));
  }

  std::size_t expanded = 0;
  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (node.bound < incumbent.total_profit - kEps) break;
    if (++expanded > opts.max_nodes) throw SizeLimitError("exact scheduler exceeded its node budget");

    // Find a conflicting target.
    std::vector<std::vector<std::size_t>> takers(targets.size());
    for (std::size_t s = 0; s < S; ++s)
      for (auto* w : node.chains[s]) takers[tindex[w->target_id]].push_back(s);
    int conflict = -1;
    double conflict_weight = -1.0;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (takers[t].size() < 2) continue;
      double wsum = 0.0;
      for (std::size_t s : takers[t])
        for (auto* w : node.chains[s])
          if (tindex[w->target_id] == static_cast<int>(t)) wsum += w->profit;
      if (wsum > conflict_weight + kEps) {
        conflict_weight = wsum;
        conflict = static_cast<int>(t);
      }
    }
    if (conflict < 0) {
      auto cand = to_schedule(node.chains);
      if (better_schedule(cand, incumbent)) incumbent = std::move(cand);
      continue;
    }

    // Children: target goes to exactly one of the takers, or to none of them.
    const auto& tk = takers[conflict];
    std::vector<Mask> child_masks;
    for (std::size_t s : tk) {
      Mask m = node.allowed;
      for (std::size_t q = 0; q < S; ++q) m[conflict][q] = q == s;
      child_masks.push_back(std::move(m));
    }
    {
      Mask m = node.allowed;
      for (std::size_t s : tk) m[conflict][s] = 0;
      child_masks.push_back(std::move(m));
    }
    for (auto& m : child_masks) {
      Node child;
      child.allowed = std::move(m);
      child.chains = node.chains;
      child.profits = node.profits;
      bool dead = false;
      for (std::size_t s = 0; s < S && !dead; ++s) {
        if (child.allowed[conflict][s] == node.allowed[conflict][s]) continue;
        // A chain that skips the target stays optimal when the target is removed.
        if (std::find(tk.begin(), tk.end(), s) == tk.end()) continue;
        const double others =
            std::accumulate(child.profits.begin(), child.profits.end(), 0.0) - child.profits[s];
        const double thr = std::max(0.0, incumbent.total_profit - others) - 2 * kEps;
        bool found = false;
        auto r = solve_sat(s, child.allowed, thr, found);
        if (!found) {
          // Best chain for s cannot lift the total above the incumbent.
          dead = true;
          break;
        }
        child.chains[s] = r.chain;
        child.profits[s] = r.profit;
      }
      if (dead) continue;
      child.bound = std::accumulate(child.profits.begin(), child.profits.end(), 0.0);
      if (child.bound < incumbent.total_profit - kEps) continue;
      child.seq = seq++;
      open.push(std::move(child));
    }
  }
  return incumbent;
}

// ---------------------------------------------------------------------------

ObservationSchedule solve_fifo(const SchedulingInstance& inst_in) {
  SchedulingInstance inst = inst_in;
  inst.normalize();
  std::vector<const ObservationWindow*> order;
  for (const auto& w : inst.otws) order.push_back(&w);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) {
    if (a->timestamp != b->timestamp) return a->timestamp < b->timestamp;
    if (a->sat_id != b->sat_id) return a->sat_id < b->sat_id;
    return a->id < b->id;
  });
  std::map<int, std::vector<ObservationWindow>> chains;
  std::map<int, double> energy;
  std::set<int> used;
  for (auto* w : order) {
    if (used.count(w->target_id)) continue;
    auto& c = chains[w->sat_id];
    if (!c.empty()) {
      const double dt = acquisition::transition_time(c.back(), *w);
      if (w->timestamp < c.back().timestamp + dt - kEps) continue;
      const double e = energy[w->sat_id] + dt * inst.agility.p_man_w;
      if (e > inst.agility.e_max_j + kEps) continue;
      energy[w->sat_id] = e;
    }
    c.push_back(*w);
    used.insert(w->target_id);
  }
  std::vector<std::vector<ObservationWindow>> out;
  for (auto& [s, c] : chains) out.push_back(std::move(c));
  return make_schedule(inst, out);
}

// ---------------------------------------------------------------------------
// Genetic algorithm. Chromosome: a target permutation plus a preferred OTW
// per target. Decoding inserts targets in permutation order, trying the
// preferred OTW first and then the rest by descending profit.

ObservationSchedule solve_ga(const SchedulingInstance& inst_in, const GaOptions& opts) {
  if (opts.population < 2 || opts.generations < 0 || opts.p_crossover < 0 || opts.p_crossover > 1 ||
      opts.p_mutation < 0 || opts.p_mutation > 1)
    throw ConfigError("invalid GA parameters");
  SchedulingInstance inst = inst_in;
  inst.normalize();
  const auto targets = inst.target_ids();
  const std::size_t T = targets.size();
  if (T == 0) return ObservationSchedule{};

  std::map<int, std::size_t> tpos;
  for (std::size_t i = 0; i < T; ++i) tpos[targets[i]] = i;
  std::vector<std::vector<const ObservationWindow*>> options(T);
  for (const auto& w : inst.otws) options[tpos[w.target_id]].push_back(&w);
  for (auto& o : options)
    std::stable_sort(o.begin(), o.end(), [](auto* a, auto* b) { return a->profit > b->profit; });

  struct Individual {
    std::vector<std::size_t> perm;
    std::vector<std::size_t> pick;
    double fitness = -1.0;
  };

  auto decode = [&](const Individual& ind) {
    ChainBuilder b(inst);
    for (std::size_t t : ind.perm) {
      const auto& o = options[t];
      if (b.try_insert(*o[ind.pick[t]])) continue;
      for (std::size_t k = 0; k < o.size(); ++k)
        if (k != ind.pick[t] && b.try_insert(*o[k])) break;
    }
    return b;
  };

  Rng rng = make_rng(opts.seed, Stream::kGenetic, 0);
  auto randint = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  std::vector<Individual> pop(static_cast<std::size_t>(opts.population));
  for (std::size_t i = 0; i < pop.size(); ++i) {
    auto& ind = pop[i];
    ind.perm.resize(T);
    std::iota(ind.perm.begin(), ind.perm.end(), 0);
    ind.pick.assign(T, 0);
    if (i == 0) {
      // One seeded individual: targets by best profit, best OTW first.
      std::stable_sort(ind.perm.begin(), ind.perm.end(), [&](std::size_t a, std::size_t b) {
        return options[a][0]->profit > options[b][0]->profit;
      });
    } else {
      std::shuffle(ind.perm.begin(), ind.perm.end(), rng);
      for (std::size_t t = 0; t < T; ++t) ind.pick[t] = randint(options[t].size());
    }
    ind.fitness = decode(ind).profit();
  }

  auto tournament = [&]() -> const Individual& {
    const auto& a = pop[randint(pop.size())];
    const auto& b = pop[randint(pop.size())];
    return a.fitness >= b.fitness ? a : b;
  };

  for (int g = 0; g < opts.generations; ++g) {
    auto elite = *std::max_element(pop.begin(), pop.end(),
                                   [](const auto& a, const auto& b) { return a.fitness < b.fitness; });
    std::vector<Individual> next{elite};
    while (next.size() < pop.size()) {
      Individual child = tournament();
      if (uniform01(rng) < opts.p_crossover) {
        const Individual& other = tournament();
        // Order crossover: keep a prefix, fill the rest in the other parent's order.
        const std::size_t cut = randint(T + 1);
        std::vector<char> taken(T, 0);
        std::vector<std::size_t> perm(child.perm.begin(), child.perm.begin() + cut);
        for (std::size_t t : perm) taken[t] = 1;
        for (std::size_t t : other.perm)
          if (!taken[t]) {
            perm.push_back(t);
            child.pick[t] = other.pick[t];
          }
        child.perm = std::move(perm);
      }
      if (uniform01(rng) < opts.p_mutation && T > 1) {
        std::swap(child.perm[randint(T)], child.perm[randint(T)]);
        const std::size_t t = randint(T);
        child.pick[t] = randint(options[t].size());
      }
      child.fitness = decode(child).profit();
      next.push_back(std::move(child));
    }
    pop = std::move(next);
  }
  const auto& best = *std::max_element(pop.begin(), pop.end(),
                                       [](const auto& a, const auto& b) { return a.fitness < b.fitness; });
  return decode(best).build();
}

SolverKind parse_solver(const std::string& name) {
  if (name == "exact") return SolverKind::kExact;
  if (name == "ga") return SolverKind::kGa;
  if (name == "fifo") return SolverKind::kFifo;
  throw ConfigError("unknown solver '" + name + "' (expected exact, ga or fifo)");
}

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kExact: return "exact";
    case SolverKind::kGa: return "ga";
    case SolverKind::kFifo: return "fifo";
  }
  return "?";
}

ObservationSchedule solve(const SchedulingInstance& inst, SolverKind kind, const GaOptions& ga,
                          const ExactOptions& exact, bool* fell_back) {
  if (fell_back) *fell_back = false;
  switch (kind) {
    case SolverKind::kFifo: return solve_fifo(inst);
    case SolverKind::kGa: return solve_ga(inst, ga);
    case SolverKind::kExact:
      try {
        return solve_exact(inst, exact);
      } catch (const SizeLimitError&) {
        if (fell_back) *fell_back = true;
        return solve_ga(inst, ga);
      }
  }
  return {};
}

// ---------------------------------------------------------------------------

RescheduleResult reschedule_across_sth(const std::vector<SchedulingInstance>& instances,
                                       const std::vector<int>& target_ids, atmosphere::Cn2Sampler& sampler,
                                       const RescheduleOptions& opts) {
  RescheduleResult res;
  std::map<int, std::size_t> rec;
  for (int t : target_ids) {
    if (rec.count(t)) throw ConfigError("duplicate target id " + std::to_string(t));
    rec[t] = res.targets.size();
    res.targets.push_back(TargetRecord{t, 0, false, -1});
  }
  for (std::size_t k = 0; k < instances.size(); ++k) {
    SchedulingInstance inst = instances[k];
    std::erase_if(inst.otws, [&](const ObservationWindow& w) {
      auto it = rec.find(w.target_id);
      return it == rec.end() || res.targets[it->second].acquired;
    });
    SthOutcome step;
    step.sth = static_cast<int>(k);
    step.schedule = solve(inst, opts.solver, opts.ga, opts.exact, &step.fell_back_to_ga);
    step.expected_profit = step.schedule.total_profit;
    for (const auto& w : step.schedule.flattened()) {
      const double cn2 = sampler.draw();
      const bool ok = cn2 <= sampler.model().threshold;
      step.cn2.push_back(cn2);
      step.accepted.push_back(ok ? 1 : 0);
      auto& tr = res.targets[rec.at(w.target_id)];
      ++tr.attempts;
      if (ok) {
        tr.acquired = true;
        tr.acquired_in_sth = step.sth;
        step.actual_profit += w.profit;
      }
    }
    res.total_actual_profit += step.actual_profit;
    res.steps.push_back(std::move(step));
  }
  std::size_t acquired = 0, rescheduled = 0, attempted = 0, attempts = 0;
  for (const auto& t : res.targets) {
    if (t.acquired) ++acquired;
    if (t.attempts > 0) ++attempted;
    attempts += static_cast<std::size_t>(t.attempts);
    if (t.attempts > 1 || (t.attempts == 1 && !t.acquired)) ++rescheduled;
  }
  const double n = res.targets.empty() ? 1.0 : static_cast<double>(res.targets.size());
  res.success_fraction = acquired / n;
  res.rescheduled_fraction = rescheduled / n;
  res.attempts_per_target = attempted ? static_cast<double>(attempts) / attempted : 0.0;
  return res;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json otw_to_json(const ObservationWindow& w) {
  return {{"id", w.id},
          {"sat", w.sat_id},
          {"target", w.target_id},
          {"orbit", w.orbit},
          {"window_index", w.window_index},
          {"timestamp", w.timestamp},
          {"roll", w.attitude.roll_deg},
          {"pitch", w.attitude.pitch_deg},
          {"yaw", w.attitude.yaw_deg},
          {"profit", w.profit},
          {"gsd", w.gsd},
          {"vtw_start", w.vtw_start},
          {"vtw_end", w.vtw_end}};
}

ObservationWindow otw_from_json(const nlohmann::json& j) {
  ObservationWindow w;
  w.id = j.at("id").get<int>();
  w.sat_id = j.at("sat").get<int>();
  w.target_id = j.at("target").get<int>();
  w.orbit = j.value("orbit", 0);
  w.window_index = j.value("window_index", 0);
  w.timestamp = j.at("timestamp").get<double>();
  w.attitude.roll_deg = j.at("roll").get<double>();
  w.attitude.pitch_deg = j.at("pitch").get<double>();
  w.attitude.yaw_deg = j.value("yaw", 0.0);
  w.profit = j.at("profit").get<double>();
  w.gsd = j.value("gsd", 0.0);
  w.vtw_start = j.value("vtw_start", w.timestamp);
  w.vtw_end = j.value("vtw_end", w.timestamp);
  return w;
}

}  // namespace

nlohmann::json instance_to_json(const SchedulingInstance& inst) {
  nlohmann::json j;
  j["sth_start"] = inst.sth_start;
  j["sth_end"] = inst.sth_end;
  j["satellites"] = inst.satellites;
  j["agility"] = {{"roll_max_deg", inst.agility.roll_max_deg}, {"pitch_max_deg", inst.agility.pitch_max_deg},
                  {"yaw_max_deg", inst.agility.yaw_max_deg},   {"p_man_w", inst.agility.p_man_w},
                  {"e_max_j", inst.agility.e_max_j},           {"prc_s", inst.agility.prc_s},
                  {"gsd_nadir", inst.agility.gsd_nadir}};
  j["otws"] = nlohmann::json::array();
  for (const auto& w : inst.otws) j["otws"].push_back(otw_to_json(w));
  return j;
}

SchedulingInstance instance_from_json(const nlohmann::json& j) {
  try {
    SchedulingInstance inst;
    inst.sth_start = j.value("sth_start", 0.0);
    inst.sth_end = j.value("sth_end", 0.0);
    if (j.contains("satellites")) inst.satellites = j.at("satellites").get<std::vector<int>>();
    if (j.contains("agility")) {
      const auto& a = j.at("agility");
      inst.agility.roll_max_deg = a.value("roll_max_deg", inst.agility.roll_max_deg);
      inst.agility.pitch_max_deg = a.value("pitch_max_deg", inst.agility.pitch_max_deg);
      inst.agility.yaw_max_deg = a.value("yaw_max_deg", inst.agility.yaw_max_deg);
      inst.agility.p_man_w = a.value("p_man_w", inst.agility.p_man_w);
      inst.agility.e_max_j = a.value("e_max_j", inst.agility.e_max_j);
      inst.agility.prc_s = a.value("prc_s", inst.agility.prc_s);
      inst.agility.gsd_nadir = a.value("gsd_nadir", inst.agility.gsd_nadir);
    }
    for (const auto& o : j.at("otws")) inst.otws.push_back(otw_from_json(o));
    inst.normalize();
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad scheduling instance: ") + e.what());
  }
}

nlohmann::json schedule_to_json(const ObservationSchedule& s) {
  nlohmann::json j;
  j["total_profit"] = s.total_profit;
  j["maneuver_energy_j"] = s.maneuver_energy_j;
  j["completion_time"] = s.completion_time();
  j["sequences"] = nlohmann::json::array();
  for (const auto& seq : s.sequences) {
    nlohmann::json q;
    q["sat"] = seq.sat_id;
    q["maneuver_energy_j"] = seq.maneuver_energy_j;
    q["items"] = nlohmann::json::array();
    for (const auto& it : seq.items) {
      auto o = otw_to_json(it.otw);
      o["transition_s"] = it.transition_s;
      o["maneuver_energy_j"] = it.maneuver_energy_j;
      q["items"].push_back(std::move(o));
    }
    j["sequences"].push_back(std::move(q));
  }
  j["successors"] = s.successor_pairs();
  return j;
}

std::string schedule_to_csv(const ObservationSchedule& s) {
  std::ostringstream os;
  os.precision(10);
  os << "sat,otw,target,timestamp,roll,pitch,yaw,gsd,profit,transition_s,maneuver_energy_j\n";
  for (const auto& seq : s.sequences)
    for (const auto& it : seq.items) {
      const auto& w = it.otw;
      os << seq.sat_id << ',' << w.id << ',' << w.target_id << ',' << w.timestamp << ','
         << w.attitude.roll_deg << ',' << w.attitude.pitch_deg << ',' << w.attitude.yaw_deg << ',' << w.gsd
         << ',' << w.profit << ',' << it.transition_s << ',' << it.maneuver_energy_j << '\n';
    }
  return os.str();
}

}  // namespace orbitedge::obs
