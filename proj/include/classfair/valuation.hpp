#pragma once

#include <optional>
#include <vector>

#include "classfair/instance.hpp"
#include "classfair/matching.hpp"

namespace classfair {

// A bundle of items handed to a valuation query. Dummy entries are copies of
// an existing item (same adjacency) used by the audit machinery; only dummies
// may repeat an item id.
struct BundleEntry {
  int item;
  bool dummy = false;
};
using Bundle = std::vector<BundleEntry>;

Bundle to_bundle(const std::vector<int>& items);

// V_i*(B): size of the maximum matching between class `cls` and the bundle.
// Hopcroft-Karp; dummies match like their originals.
int optimistic_value(const Instance& inst, int cls, const Bundle& bundle);
int optimistic_value(const Instance& inst, int cls, const std::vector<int>& items);

// V_i(X) = |Y_i(X)|.
int class_value(const Instance& inst, const Matching& m, int cls);

// usw(X*): maximum matching size of the whole instance.
int usw_opt(const Instance& inst);

struct CefPair {
  int i, j;
  int v_i;          // V_i(X)
  int v_star;       // V_i*(Y_j(X))
  bool satisfied;   // v_star == 0: the inequality holds for every alpha
  double ratio;     // v_i / v_star when v_star > 0, else 1
};

struct CefReport {
  std::vector<CefPair> pairs;  // all ordered pairs i != j
  double cef_alpha;            // min finite ratio, capped at 1; 1 if none
};

CefReport cef_report(const Instance& inst, const Matching& m);

// CEF1: for every pair i != j, Y_j empty or some removal o in Y_j gives
// V_i(X) >= V_i*(Y_j \ {o}).
bool cef1_check(const Instance& inst, const Matching& m);

// (prod_i V_i)^(1/k); the integer product is exposed for exact comparisons.
long long class_value_product(const Instance& inst, const Matching& m);
double cnsw(const Instance& inst, const Matching& m);

struct OracleCaps {
  int prop_max_items = 10;
  int prop_max_classes = 4;
  int cmnw_max_items = 8;
};

struct PropResult {
  int value;                    // exact integral prop_i
  bool divisible_gap_possible;  // false = certified equal to the divisible optimum
  int flow_upper_bound_num;     // divisible prop_i <= flow_upper_bound_num / k
};

// Exact prop_i over integral matchings by exhaustive search over class
// assignments with feasible bundles. The divisible optimum is sandwiched as
//   value <= prop_i^div <= flow/k
// where flow is the max integer flow with item capacity 1 and class-i agent
// capacity k (LP value at item capacities 1/k, scaled); the flag clears when
// the sandwich collapses.
PropResult prop_share_oracle(const Instance& inst, int cls, const OracleCaps& caps = {});

struct CmnwResult {
  Matching matching;
  long long product;  // prod_i V_i
  double value;       // product^(1/k)
};

// Enumerates all maximal (non-wasteful) matchings; returns one maximizing the
// class-value product, ties broken by lexicographically smallest assignment
// map (unmatched ordered after any agent id).
CmnwResult cmnw_bruteforce(const Instance& inst, const OracleCaps& caps = {});

struct ClassPropEntry {
  int cls;
  int v;
  PropResult prop;
  double ratio;  // v / prop when prop > 0, else 1
};

struct MetricsOptions {
  bool with_cef1 = true;
  bool with_cprop = false;  // runs the prop oracle (subject to caps)
  OracleCaps caps{};
};

struct MetricsReport {
  int usw = 0;
  bool nonwasteful = false;
  CefReport cef;
  std::optional<bool> cef1;
  double cnsw_value = 0.0;
  std::vector<ClassPropEntry> cprop;  // empty unless with_cprop
};

MetricsReport compute_metrics(const Instance& inst, const Matching& m,
                              const MetricsOptions& opts = {});

}  // namespace classfair
