#include "classfair/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "classfair/error.hpp"
#include "classfair/rng.hpp"

namespace classfair {

RunTrace run_random(const Instance& inst, uint64_t seed, const RandomOptions& opts) {
  const int k = inst.num_classes();
  const int m = inst.num_items();
  RunTrace trace(inst);
  if (opts.audit) trace.audit_sets.assign(k, {});

  Rng rng = make_rng(seed);

  // stopping-time bookkeeping (two-class instances)
  const bool track_stop = opts.record_stopping && k == 2;
  std::vector<int> last_liked;
  std::vector<std::vector<int>> liked_ending_at;  // class-0 agents whose last item is t
  int n1 = 0;
  if (track_stop) {
    last_liked.assign(inst.num_agents(), -1);
    for (int t = 0; t < m; ++t)
      for (int a : inst.neighbors(t)) last_liked[a] = t;
    liked_ending_at.assign(m, {});
    for (int a = 0; a < inst.num_agents(); ++a) {
      if (inst.agent_class(a) == 0 && last_liked[a] >= 0) {
        liked_ending_at[last_liked[a]].push_back(a);
        ++n1;
      }
    }
    trace.n1_trajectory.reserve(m + 1);
  }

  std::vector<int> eligible_count(k);
  std::vector<char> has_adjacent(k);
  for (int t = 0; t < m; ++t) {
    if (track_stop) trace.n1_trajectory.push_back(n1);

    std::fill(eligible_count.begin(), eligible_count.end(), 0);
    std::fill(has_adjacent.begin(), has_adjacent.end(), 0);
    for (int a : inst.neighbors(t)) {
      const int c = inst.agent_class(a);
      has_adjacent[c] = 1;
      if (!trace.matching.agent_saturated(a)) ++eligible_count[c];
    }

    std::vector<int> candidates;
    for (int c = 0; c < k; ++c)
      if (eligible_count[c] > 0) candidates.push_back(c);

    if (opts.audit) {
      for (int c = 0; c < k; ++c)
        if (has_adjacent[c] && eligible_count[c] == 0) trace.audit_sets[c].push_back({t, true});
    }

    int chosen_class = -1, chosen_agent = -1;
    if (!candidates.empty()) {
      chosen_class =
          candidates[static_cast<size_t>(uniform_below(rng, candidates.size()))];
      uint64_t r = uniform_below(rng, eligible_count[chosen_class]);
      for (int a : inst.neighbors(t)) {
        if (inst.agent_class(a) == chosen_class && !trace.matching.agent_saturated(a)) {
          if (r == 0) {
            chosen_agent = a;
            break;
          }
          --r;
        }
      }
      trace.matching.add(t, chosen_agent);
      if (opts.audit) trace.audit_sets[chosen_class].push_back({t, false});
      // the chosen agent leaves the availability pool; it was counted (it is
      // adjacent to item t, so last_liked >= t)
      if (track_stop && inst.agent_class(chosen_agent) == 0) --n1;
    }

    if (track_stop) {
      for (int a : liked_ending_at[t])
        if (!trace.matching.agent_saturated(a)) --n1;
    }

    if (opts.record_steps)
      trace.steps.push_back({t, std::move(candidates), chosen_class, chosen_agent});
  }

  if (track_stop) {
    trace.n1_trajectory.push_back(0);
    trace.tau = m;
    for (int t = 1; t <= m; ++t) {
      if (trace.n1_trajectory[t] == 0) {
        trace.tau = t;
        break;
      }
    }
  }
  return trace;
}

Matching run_greedy_lexico(const Instance& inst) {
  Matching m(inst);
  for (int t = 0; t < inst.num_items(); ++t) {
    int best = -1;
    for (int a : inst.neighbors(t)) {
      if (m.agent_saturated(a)) continue;
      if (best < 0 || std::pair(inst.agent_class(a), a) < std::pair(inst.agent_class(best), best))
        best = a;
    }
    if (best >= 0) m.add(t, best);
  }
  return m;
}

namespace {

// Validates that `inst` matches gen_divisible_hardness(n) for some n and
// returns n. The strategy's bookkeeping depends on the nested structure.
int divisible_hardness_size(const Instance& inst) {
  const auto fail = [](const std::string& why) -> int {
    throw Error(ErrorCode::invalid_argument,
                "run_divisible_split: instance does not match the divisible "
                "hardness construction (" +
                    why + ")");
  };
  if (inst.num_classes() != 2) return fail("needs exactly 2 classes");
  const int n = inst.num_agents() / 2;
  if (inst.num_agents() != 2 * n || inst.num_items() != 2 * n) return fail("size mismatch");
  for (int a = 0; a < n; ++a)
    if (inst.agent_class(a) != 0) return fail("agents 0..n-1 must be class 0");
  for (int a = n; a < 2 * n; ++a)
    if (inst.agent_class(a) != 1) return fail("agents n..2n-1 must be class 1");
  for (int t = 0; t < 2 * n; ++t) {
    const int width = n - (t / 2 + 1) + 1;
    const auto& nbrs = inst.neighbors(t);
    if (static_cast<int>(nbrs.size()) != width + n) return fail("degree mismatch");
    for (int i = 0; i < width; ++i)
      if (nbrs[i] != i) return fail("class-0 prefix mismatch");
    for (int i = 0; i < n; ++i)
      if (nbrs[width + i] != n + i) return fail("class-1 suffix mismatch");
  }
  return n;
}

}  // namespace

FractionalMatching run_divisible_split(const Instance& inst, const SplitParams& params) {
  if (!(params.alpha >= 0.0 && params.alpha <= 1.0))
    throw Error(ErrorCode::invalid_argument, "run_divisible_split: alpha must be in [0,1]");
  const int n = divisible_hardness_size(inst);
  FractionalMatching fm(inst);
  const double target = (1.0 + params.alpha) / 2.0;

  std::vector<std::pair<int, double>> shares;
  for (int t = 0; t < 2 * n; ++t) {
    const int width = n - (t / 2 + 1) + 1;
    double share1 = 0.0;
    // eligible class-0 neighbors; equal split, capped at residual capacity
    int elig = 0;
    for (int a = 0; a < width; ++a)
      if (fm.agent_load(a) < 1.0) ++elig;
    if (elig > 0) {
      const double per = target / elig;
      shares.clear();
      bool cap = false;
      for (int a = 0; a < width; ++a) {
        if (fm.agent_load(a) >= 1.0) continue;
        const double residual = 1.0 - fm.agent_load(a);
        if (per >= residual) {
          cap = true;
          share1 += residual;
          fm.saturate_agent(a, t);
        } else {
          shares.emplace_back(a, per);
          share1 += per;
        }
      }
      // In this construction all eligible agents carry identical loads, so
      // either every one was capped or none; a mixed outcome would mean the
      // invariant broke.
      if (cap && !shares.empty())
        throw Error(ErrorCode::validation, "divisible split: uneven class-0 loads");
      if (!shares.empty()) fm.add_shares(t, shares);
    }
    // remainder to class 1, equal split across all class-1 agents
    const double rest = 1.0 - share1;
    if (rest > 0.0) {
      const double per2 = rest / n;
      const double residual2 = 1.0 - fm.agent_load(n);  // all class-1 loads equal
      if (per2 >= residual2) {
        for (int a = n; a < 2 * n; ++a) fm.saturate_agent(a, t);
      } else {
        shares.clear();
        for (int a = n; a < 2 * n; ++a) shares.emplace_back(a, per2);
        fm.add_shares(t, shares);
      }
    }
  }
  return fm;
}

SplitLoads divisible_split_loads(long long n, const SplitParams& params) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "divisible_split_loads: n must be >= 1");
  if (!(params.alpha >= 0.0 && params.alpha <= 1.0))
    throw Error(ErrorCode::invalid_argument, "divisible_split_loads: alpha must be in [0,1]");
  const double target = (1.0 + params.alpha) / 2.0;
  double load1 = 0.0;  // common load of the currently eligible class-0 prefix
  double load2 = 0.0;  // common load of class-1 agents
  double v1 = 0.0;
  bool done1 = false, done2 = false;
  for (long long t = 0; t < 2 * n; ++t) {
    const long long width = n - (t / 2 + 1) + 1;
    double share1 = 0.0;
    if (!done1 && width > 0) {
      const double per = target / static_cast<double>(width);
      const double residual = 1.0 - load1;
      if (per >= residual) {
        share1 = residual * static_cast<double>(width);
        load1 = 1.0;
        done1 = true;  // later prefixes are subsets of this saturated one
      } else {
        load1 += per;
        share1 = target;
      }
      v1 += share1;
    }
    if (!done2) {
      const double rest = 1.0 - share1;
      const double per2 = rest / static_cast<double>(n);
      const double residual2 = 1.0 - load2;
      if (per2 >= residual2) {
        load2 = 1.0;
        done2 = true;
      } else {
        load2 += per2;
      }
    }
  }
  return {v1, load2 * static_cast<double>(n)};
}

namespace {

// Persistent Kuhn state for one (observing class, bundle owner) pair; used by
// the envy-capped greedy to answer V_i*(Y_j + o) queries incrementally.
class PairMatcher {
 public:
  PairMatcher(const Instance& inst, int cls) : inst_(&inst), cls_(cls) {
    match_agent_.assign(inst.class_agents(cls).size(), -1);
  }

  int value() const { return value_; }

  // Value if `item` joined the bundle; state unchanged.
  int query_with(int item) {
    trail_.clear();
    const bool grew = augment_item(item, true);
    for (auto it = trail_.rbegin(); it != trail_.rend(); ++it) {
      match_agent_[it->first] = it->second;
    }
    return value_ + (grew ? 1 : 0);
  }

  void commit(int item) {
    trail_.clear();
    if (augment_item(item, false)) ++value_;
  }

 private:
  bool augment_item(int item, bool tentative) {
    std::vector<char> seen(match_agent_.size(), 0);
    return augment_entry(item, seen, tentative);
  }

  bool augment_entry(int item, std::vector<char>& seen, bool tentative) {
    for (int a : inst_->neighbors(item)) {
      if (inst_->agent_class(a) != cls_) continue;
      const int v = inst_->class_position(a);
      if (seen[v]) continue;
      seen[v] = 1;
      if (match_agent_[v] < 0 || augment_entry(match_agent_[v], seen, tentative)) {
        if (tentative) trail_.emplace_back(v, match_agent_[v]);
        match_agent_[v] = item;
        return true;
      }
    }
    return false;
  }

  const Instance* inst_;
  int cls_;
  std::vector<int> match_agent_;  // local agent -> item id
  std::vector<std::pair<int, int>> trail_;
  int value_ = 0;
};

}  // namespace

Matching run_envy_capped_greedy(const Instance& inst, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw Error(ErrorCode::invalid_argument, "run_envy_capped_greedy: alpha must be in [0,1]");
  const int k = inst.num_classes();
  Matching m(inst);
  std::vector<int> values(k, 0);
  // matcher[i][j]: V_i^* of class j's bundle
  std::vector<std::vector<PairMatcher>> matcher;
  matcher.reserve(k);
  for (int i = 0; i < k; ++i) {
    std::vector<PairMatcher> row;
    row.reserve(k);
    for (int j = 0; j < k; ++j) row.emplace_back(inst, i);
    matcher.push_back(std::move(row));
  }

  for (int t = 0; t < inst.num_items(); ++t) {
    std::vector<char> eligible(k, 0);
    for (int a : inst.neighbors(t))
      if (!m.agent_saturated(a)) eligible[inst.agent_class(a)] = 1;
    std::vector<int> elig;
    for (int c = 0; c < k; ++c)
      if (eligible[c]) elig.push_back(c);
    if (elig.empty()) continue;

    std::vector<int> candidates;
    for (int j : elig) {
      bool violates = false;
      for (int i : elig) {
        if (i == j) continue;
        const int vstar = matcher[i][j].query_with(t);
        if (static_cast<double>(values[i]) < alpha * static_cast<double>(vstar)) {
          violates = true;
          break;
        }
      }
      if (!violates) candidates.push_back(j);
    }
    if (candidates.empty()) candidates = elig;  // non-wastefulness first

    int pick = candidates[0];
    for (int j : candidates)
      if (std::pair(values[j], j) < std::pair(values[pick], pick)) pick = j;

    int agent = -1;
    for (int a : inst.neighbors(t)) {
      if (inst.agent_class(a) == pick && !m.agent_saturated(a) && (agent < 0 || a < agent))
        agent = a;
    }
    m.add(t, agent);
    ++values[pick];
    for (int i = 0; i < k; ++i) matcher[i][pick].commit(t);
  }
  return m;
}

double solve_divisible_fixed_point(double tol) {
  if (!(tol > 0.0))
    throw Error(ErrorCode::invalid_argument, "solve_divisible_fixed_point: tol must be > 0");
  const auto residual = [](double b) {
    return 2.0 * (1.0 - std::exp(-(1.0 + b) / 2.0)) / (1.0 + b) - b;
  };
  double lo = 0.0, hi = 1.0;  // residual(0) > 0 > residual(1)
  double mid = 0.5;
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    const double r = residual(mid);
    if (hi - lo <= tol && std::abs(r) <= tol) break;
    if (r > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return mid;
}

long long harmonic_stop_index(long long n, double alpha) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "harmonic_stop_index: n must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw Error(ErrorCode::invalid_argument, "harmonic_stop_index: alpha must be in [0,1]");
  const double coeff = (1.0 + alpha) / 2.0;
  double sum = 0.0;  // H_n - H_{n-i}
  for (long long i = 1; i <= n; ++i) {
    sum += 1.0 / static_cast<double>(n - i + 1);
    if (coeff * sum >= 0.5) return i;
  }
  return n;
}

}  // namespace classfair
