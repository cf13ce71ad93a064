#include "classfair/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <string>

#include "classfair/error.hpp"

namespace classfair {

namespace {

// Hopcroft-Karp on (left = bundle entries, right = class agents). adj holds,
// per left node, indices into the class agent list.
class HopcroftKarp {
 public:
  HopcroftKarp(int num_left, int num_right, std::vector<std::vector<int>> adj)
      : nl_(num_left), nr_(num_right), adj_(std::move(adj)) {}

  int solve() {
    match_l_.assign(nl_, -1);
    match_r_.assign(nr_, -1);
    int matching = 0;
    // greedy warm start
    for (int u = 0; u < nl_; ++u) {
      for (int v : adj_[u]) {
        if (match_r_[v] < 0) {
          match_l_[u] = v;
          match_r_[v] = u;
          ++matching;
          break;
        }
      }
    }
    while (bfs()) {
      for (int u = 0; u < nl_; ++u) {
        if (match_l_[u] < 0 && dfs(u)) ++matching;
      }
    }
    return matching;
  }

 private:
  static constexpr int kInf = std::numeric_limits<int>::max();

  bool bfs() {
    std::queue<int> q;
    dist_.assign(nl_, kInf);
    for (int u = 0; u < nl_; ++u) {
      if (match_l_[u] < 0) {
        dist_[u] = 0;
        q.push(u);
      }
    }
    bool found = false;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj_[u]) {
        const int w = match_r_[v];
        if (w < 0) {
          found = true;
        } else if (dist_[w] == kInf) {
          dist_[w] = dist_[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  }

  bool dfs(int u) {
    for (int v : adj_[u]) {
      const int w = match_r_[v];
      if (w < 0 || (dist_[w] == dist_[u] + 1 && dfs(w))) {
        match_l_[u] = v;
        match_r_[v] = u;
        return true;
      }
    }
    dist_[u] = kInf;
    return false;
  }

  int nl_, nr_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> match_l_, match_r_, dist_;
};

// Adjacency of a bundle restricted to one class, agents renumbered locally.
std::vector<std::vector<int>> bundle_adjacency(const Instance& inst, int cls,
                                               const Bundle& bundle) {
  std::vector<std::vector<int>> adj(bundle.size());
  for (size_t e = 0; e < bundle.size(); ++e) {
    for (int a : inst.neighbors(bundle[e].item)) {
      if (inst.agent_class(a) == cls) adj[e].push_back(inst.class_position(a));
    }
  }
  return adj;
}

void check_class(const Instance& inst, int cls) {
  if (cls < 0 || cls >= inst.num_classes())
    throw Error(ErrorCode::invalid_argument, "invalid class id " + std::to_string(cls));
}

}  // namespace

Bundle to_bundle(const std::vector<int>& items) {
  Bundle b;
  b.reserve(items.size());
  for (int o : items) b.push_back({o, false});
  return b;
}

int optimistic_value(const Instance& inst, int cls, const Bundle& bundle) {
  check_class(inst, cls);
  if (bundle.empty()) return 0;
  for (const auto& e : bundle) {
    if (e.item < 0 || e.item >= inst.num_items())
      throw Error(ErrorCode::invalid_argument,
                  "bundle item " + std::to_string(e.item) + " not in the instance");
  }
  auto adj = bundle_adjacency(inst, cls, bundle);
  HopcroftKarp hk(static_cast<int>(bundle.size()),
                  static_cast<int>(inst.class_agents(cls).size()), std::move(adj));
  return hk.solve();
}

int optimistic_value(const Instance& inst, int cls, const std::vector<int>& items) {
  return optimistic_value(inst, cls, to_bundle(items));
}

int class_value(const Instance& inst, const Matching& m, int cls) {
  check_class(inst, cls);
  int v = 0;
  for (int a : inst.class_agents(cls))
    if (m.agent_saturated(a)) ++v;
  return v;
}

int usw_opt(const Instance& inst) {
  std::vector<std::vector<int>> adj(inst.num_items());
  for (int t = 0; t < inst.num_items(); ++t) adj[t] = inst.neighbors(t);
  HopcroftKarp hk(inst.num_items(), inst.num_agents(), std::move(adj));
  return hk.solve();
}

CefReport cef_report(const Instance& inst, const Matching& m) {
  const int k = inst.num_classes();
  const auto bundles = m.bundles();
  const auto values = m.class_values();
  CefReport rep;
  rep.cef_alpha = 1.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      CefPair p;
      p.i = i;
      p.j = j;
      p.v_i = values[i];
      p.v_star = optimistic_value(inst, i, bundles[j]);
      p.satisfied = (p.v_star == 0);
      p.ratio = p.satisfied ? 1.0
                            : std::min(1.0, static_cast<double>(p.v_i) /
                                                static_cast<double>(p.v_star));
      if (!p.satisfied) rep.cef_alpha = std::min(rep.cef_alpha, p.ratio);
      rep.pairs.push_back(p);
    }
  }
  return rep;
}

bool cef1_check(const Instance& inst, const Matching& m) {
  const int k = inst.num_classes();
  const auto bundles = m.bundles();
  const auto values = m.class_values();
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      const auto& yj = bundles[j];
      if (yj.empty()) continue;
      const int vstar = optimistic_value(inst, i, yj);
      if (values[i] >= vstar) continue;         // any removal works
      if (values[i] < vstar - 1) return false;  // a removal shrinks V* by at most 1
      // boundary: need a removal that actually drops the optimum
      bool ok = false;
      Bundle reduced;
      for (size_t drop = 0; drop < yj.size() && !ok; ++drop) {
        reduced.clear();
        for (size_t t = 0; t < yj.size(); ++t)
          if (t != drop) reduced.push_back({yj[t], false});
        ok = values[i] >= optimistic_value(inst, i, reduced);
      }
      if (!ok) return false;
    }
  }
  return true;
}

long long class_value_product(const Instance& inst, const Matching& m) {
  // exact only at oracle scale; the general-purpose value is cnsw() below
  long long prod = 1;
  for (int c = 0; c < inst.num_classes(); ++c) prod *= class_value(inst, m, c);
  return prod;
}

double cnsw(const Instance& inst, const Matching& m) {
  // geometric mean in log domain; products overflow quickly as k grows
  double log_sum = 0.0;
  for (int c = 0; c < inst.num_classes(); ++c) {
    const int v = class_value(inst, m, c);
    if (v == 0) return 0.0;
    log_sum += std::log(static_cast<double>(v));
  }
  return std::exp(log_sum / inst.num_classes());
}

namespace {

// Incremental matcher for the prop oracle's DFS: one augmenting pass per
// added item, rollback via snapshots.
class IncrementalMatcher {
 public:
  IncrementalMatcher(const Instance& inst, int cls) : inst_(&inst), cls_(cls) {
    match_agent_.assign(inst.class_agents(cls).size(), -1);
  }

  // Extends the state with `item`; returns true if the matching grew.
  bool add_item(int item) {
    const int e = static_cast<int>(entry_adj_.size());
    std::vector<int> adj;
    for (int a : inst_->neighbors(item))
      if (inst_->agent_class(a) == cls_) adj.push_back(inst_->class_position(a));
    entry_adj_.push_back(std::move(adj));
    match_entry_.push_back(-1);
    std::vector<char> seen(match_agent_.size(), 0);
    if (augment(e, seen)) {
      ++value_;
      return true;
    }
    return false;
  }

  struct Snapshot {
    std::vector<int> match_agent, match_entry;
    int value;
    size_t entries;
  };

  Snapshot snapshot() const { return {match_agent_, match_entry_, value_, entry_adj_.size()}; }

  void restore(const Snapshot& s) {
    match_agent_ = s.match_agent;
    match_entry_ = s.match_entry;
    value_ = s.value;
    entry_adj_.resize(s.entries);
  }

  int value() const { return value_; }

 private:
  bool augment(int e, std::vector<char>& seen) {
    for (int v : entry_adj_[e]) {
      if (seen[v]) continue;
      seen[v] = 1;
      if (match_agent_[v] < 0 || augment(match_agent_[v], seen)) {
        match_agent_[v] = e;
        match_entry_[e] = v;
        return true;
      }
    }
    return false;
  }

  const Instance* inst_;
  int cls_;
  std::vector<std::vector<int>> entry_adj_;
  std::vector<int> match_entry_;  // entry -> local agent
  std::vector<int> match_agent_;  // local agent -> entry
  int value_ = 0;
};

// Best achievable min over the k values if `remaining` unit increments can be
// distributed freely (each remaining item raises one bundle value by <= 1).
int waterfill_bound(std::vector<int> vals, int remaining) {
  std::sort(vals.begin(), vals.end());
  for (int level = 0;; ++level) {
    long long need = 0;
    for (int v : vals) need += std::max(0, (level + 1) - v);
    if (need > remaining) return level;
  }
}

// Max integer flow items (cap 1) -> class agents (cap agent_cap), computed as
// a matching after expanding each agent into agent_cap copies.
int item_agent_flow(const Instance& inst, int cls, int agent_cap) {
  std::vector<std::vector<int>> adj(inst.num_items());
  for (int t = 0; t < inst.num_items(); ++t) {
    for (int a : inst.neighbors(t)) {
      if (inst.agent_class(a) != cls) continue;
      const int v = inst.class_position(a);
      for (int c = 0; c < agent_cap; ++c) adj[t].push_back(v * agent_cap + c);
    }
  }
  HopcroftKarp hk(inst.num_items(),
                  static_cast<int>(inst.class_agents(cls).size()) * agent_cap,
                  std::move(adj));
  return hk.solve();
}

}  // namespace

PropResult prop_share_oracle(const Instance& inst, int cls, const OracleCaps& caps) {
  check_class(inst, cls);
  const int k = inst.num_classes();
  const int m = inst.num_items();
  if (m > caps.prop_max_items)
    throw Error(ErrorCode::cap_exceeded, "prop oracle cap: " + std::to_string(m) +
                                             " items > cap " +
                                             std::to_string(caps.prop_max_items));
  if (k > caps.prop_max_classes)
    throw Error(ErrorCode::cap_exceeded, "prop oracle cap: " + std::to_string(k) +
                                             " classes > cap " +
                                             std::to_string(caps.prop_max_classes));

  std::vector<IncrementalMatcher> feas;  // bundle j matches perfectly into class j
  std::vector<IncrementalMatcher> val;   // V_cls^* of bundle j
  feas.reserve(k);
  val.reserve(k);
  for (int j = 0; j < k; ++j) {
    feas.emplace_back(inst, j);
    val.emplace_back(inst, cls);
  }

  int best = 0;  // achieved by the all-unassigned (empty) matching

  std::function<void(int)> rec = [&](int t) {
    if (t == m) {
      int mn = std::numeric_limits<int>::max();
      for (int j = 0; j < k; ++j) mn = std::min(mn, val[j].value());
      best = std::max(best, mn);
      return;
    }
    std::vector<int> vals(k);
    for (int j = 0; j < k; ++j) vals[j] = val[j].value();
    if (waterfill_bound(vals, m - t) <= best) return;
    for (int j = 0; j < k; ++j) {
      auto fs = feas[j].snapshot();
      if (feas[j].add_item(t)) {
        auto vs = val[j].snapshot();
        val[j].add_item(t);
        rec(t + 1);
        val[j].restore(vs);
      }
      feas[j].restore(fs);
    }
    rec(t + 1);  // item left unassigned
  };
  rec(0);

  const int flow = item_agent_flow(inst, cls, k);
  PropResult out;
  out.value = best;
  out.flow_upper_bound_num = flow;
  out.divisible_gap_possible = (static_cast<long long>(k) * best < flow);
  return out;
}

CmnwResult cmnw_bruteforce(const Instance& inst, const OracleCaps& caps) {
  const int m = inst.num_items();
  if (m > caps.cmnw_max_items)
    throw Error(ErrorCode::cap_exceeded, "cmnw oracle cap: " + std::to_string(m) +
                                             " items > cap " +
                                             std::to_string(caps.cmnw_max_items));
  const int k = inst.num_classes();
  const int n = inst.num_agents();

  std::vector<int> last_liked(n, -1);
  for (int t = 0; t < m; ++t)
    for (int a : inst.neighbors(t)) last_liked[a] = t;

  std::vector<int> item_to_agent(m, -1);
  std::vector<char> saturated(n, 0);
  std::vector<int> values(k, 0);

  bool have_best = false;
  long long best_prod = -1;
  std::vector<int> best_assign;

  auto lex_less = [&](const std::vector<int>& a, const std::vector<int>& b) {
    for (int t = 0; t < m; ++t) {
      // unmatched (-1) ordered after any agent id
      const unsigned av =
          a[t] < 0 ? std::numeric_limits<unsigned>::max() : static_cast<unsigned>(a[t]);
      const unsigned bv =
          b[t] < 0 ? std::numeric_limits<unsigned>::max() : static_cast<unsigned>(b[t]);
      if (av != bv) return av < bv;
    }
    return false;
  };

  std::function<void(int)> rec = [&](int t) {
    if (t == m) {
      for (int o = 0; o < m; ++o) {  // maximality check
        if (item_to_agent[o] >= 0) continue;
        for (int a : inst.neighbors(o))
          if (!saturated[a]) return;
      }
      long long prod = 1;
      for (int v : values) prod *= v;
      if (!have_best || prod > best_prod ||
          (prod == best_prod && lex_less(item_to_agent, best_assign))) {
        have_best = true;
        best_prod = prod;
        best_assign = item_to_agent;
      }
      return;
    }
    for (int a : inst.neighbors(t)) {
      if (saturated[a]) continue;
      saturated[a] = 1;
      item_to_agent[t] = a;
      ++values[inst.agent_class(a)];
      rec(t + 1);
      --values[inst.agent_class(a)];
      item_to_agent[t] = -1;
      saturated[a] = 0;
    }
    // skip branch is dead if some free neighbor can never be matched later
    for (int a : inst.neighbors(t)) {
      if (!saturated[a] && last_liked[a] <= t) return;
    }
    rec(t + 1);
  };
  rec(0);

  CmnwResult out{Matching(inst), best_prod, 0.0};
  for (int t = 0; t < m; ++t)
    if (best_assign[t] >= 0) out.matching.add(t, best_assign[t]);
  out.value = std::pow(static_cast<double>(std::max<long long>(best_prod, 0)),
                       1.0 / static_cast<double>(k));
  return out;
}

MetricsReport compute_metrics(const Instance& inst, const Matching& m,
                              const MetricsOptions& opts) {
  MetricsReport rep;
  rep.usw = m.size();
  rep.nonwasteful = is_nonwasteful(inst, m);
  rep.cef = cef_report(inst, m);
  if (opts.with_cef1) rep.cef1 = cef1_check(inst, m);
  rep.cnsw_value = cnsw(inst, m);
  if (opts.with_cprop) {
    const auto values = m.class_values();
    for (int c = 0; c < inst.num_classes(); ++c) {
      ClassPropEntry e;
      e.cls = c;
      e.v = values[c];
      e.prop = prop_share_oracle(inst, c, opts.caps);
      e.ratio = e.prop.value > 0
                    ? static_cast<double>(e.v) / static_cast<double>(e.prop.value)
                    : 1.0;
      rep.cprop.push_back(e);
    }
  }
  return rep;
}

}  // namespace classfair
