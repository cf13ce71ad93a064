#pragma once

#include <cstdint>
#include <vector>

#include "classfair/instance.hpp"
#include "classfair/matching.hpp"
#include "classfair/valuation.hpp"

namespace classfair {

struct StepRecord {
  int item;
  std::vector<int> candidates;  // S_o, ascending class ids
  int chosen_class = -1;        // -1 when the item was skipped
  int chosen_agent = -1;
};

struct RunTrace {
  Matching matching;
  std::vector<StepRecord> steps;   // only when record_steps
  std::vector<Bundle> audit_sets;  // A_i per class, only when audit
  // Two-class instances only (class "1" of the construction = class id 0):
  // n1_trajectory[t] = unsaturated class-0 agents adjacent to some item with
  // index >= t, measured before step t; length num_items + 1 (last entry 0).
  // tau = first t >= 1 with n1_trajectory[t] == 0.
  std::vector<int> n1_trajectory;
  int tau = -1;

  explicit RunTrace(const Instance& inst) : matching(inst) {}
};

struct RandomOptions {
  bool audit = false;           // build the dummy-augmented audit sets A_i
  bool record_steps = false;    // keep per-step candidate sets
  bool record_stopping = false; // n1 trajectory + tau (two-class instances)
};

// Algorithm: per arriving item, collect the classes with an unsaturated
// adjacent agent, pick one uniformly, then pick an eligible agent within it
// uniformly. Items with no eligible agent are skipped. Deterministic given
// the seed; per item the class draw precedes the agent draw and both are
// consumed whenever the candidate set is nonempty. In audit mode, a class
// that has adjacent agents but all of them saturated receives a dummy copy
// of the item in its audit set A_i.
RunTrace run_random(const Instance& inst, uint64_t seed, const RandomOptions& opts = {});

// Deterministic baseline: each item to the lowest-class-id, then
// lowest-agent-id eligible unsaturated agent.
Matching run_greedy_lexico(const Instance& inst);

// alpha in [0,1] and beta = (1-alpha)/(1+alpha).
struct SplitParams {
  double alpha = 0.0;
  double beta() const { return (1.0 - alpha) / (1.0 + alpha); }
  static SplitParams from_beta(double beta) { return {(1.0 - beta) / (1.0 + beta)}; }
};

// The divisible strategy for gen_divisible_hardness instances: each arriving
// item gives (1+alpha)/2 to class 0, spread equally over its unsaturated
// class-0 neighbors (reduced to their remaining capacity when they near
// saturation), and the rest to class 1 spread equally (capped at class-1
// capacity). Rejects instances that do not match the construction.
FractionalMatching run_divisible_split(const Instance& inst, const SplitParams& params);

struct SplitLoads {
  double class1;  // construction class 1 = class id 0
  double class2;
};

// Same strategy evaluated through the equal-load invariant (all currently
// eligible class-0 agents always carry identical load, class-1 agents
// likewise), so it runs in O(n) and works far beyond the size at which the
// explicit instance fits in memory. Agrees with run_divisible_split on
// explicit instances; a unit test pins the two paths together.
SplitLoads divisible_split_loads(long long n, const SplitParams& params);

// Online greedy that refuses an assignment to class j when it would push
// some eligible class i below V_i >= alpha * V_i*(Y_j + o), unless every
// eligible choice violates (non-wastefulness takes precedence). Ties toward
// the smallest current V, then smallest class id, then smallest agent id.
Matching run_envy_capped_greedy(const Instance& inst, double alpha);

// Solves beta = 2 (1 - e^{-(1+beta)/2}) / (1+beta) on [0,1] by bisection;
// both the bracket width and the residual are driven below tol.
double solve_divisible_fixed_point(double tol);

// Smallest i with (1+alpha)/2 * (H_n - H_{n-i}) >= 1/2, by direct summation.
long long harmonic_stop_index(long long n, double alpha);

}  // namespace classfair
