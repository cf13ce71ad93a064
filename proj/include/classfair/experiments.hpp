#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "classfair/instance.hpp"
#include "classfair/valuation.hpp"

namespace classfair {

// One reported statistic. `pass` is present only for rows with an acceptance
// target; the comparison direction is baked in by the preset that built the
// row (|mean - target| <= tolerance, mean >= target - tolerance, ...).
struct MetricRow {
  std::string metric;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::optional<double> target;
  std::optional<double> tolerance;
  std::optional<bool> pass;
};

struct TrialSummary {
  std::string preset;
  std::string params_json;  // compact JSON of the preset parameters
  int trials = 0;
  uint64_t master_seed = 0;
  std::vector<MetricRow> rows;

  bool all_pass() const;
  const MetricRow* find(const std::string& metric) const;
};

// version/config/seed envelope embedded in every output file; the timestamp
// is excluded from the reproducibility contract.
struct OutputEnvelope {
  std::string config_json;
  std::string timestamp;
};

std::string summary_to_csv(const TrialSummary& s, const OutputEnvelope& env);
std::string summary_to_json(const TrialSummary& s, const OutputEnvelope& env);

struct AlgoSpec {
  std::string name;    // "random" | "greedy_lexico" | "envy_capped"
  double alpha = 0.0;  // envy_capped only
};

struct TrialOptions {
  int threads = 0;          // 0 = hardware concurrency
  bool audit = false;       // collect V_i*(A_i) statistics (random only)
  bool with_cprop = false;  // compare against the prop oracle (caps apply)
  OracleCaps caps{};
};

// Generic Monte Carlo harness: `trials` seeded runs of the algorithm,
// aggregated into per-class values, per-pair optimistic values, the
// ratio-of-expectations cef alpha, usw and non-wastefulness. Deterministic
// given master_seed, independent of thread count.
TrialSummary run_trials(const Instance& inst, const AlgoSpec& algo, int trials,
                        uint64_t master_seed, const TrialOptions& opts = {});

// Panels are fixed, documented parts of the experiment definitions.
std::vector<Instance> cef_lower_panel();
std::vector<Instance> cprop_panel();

TrialSummary preset_cef_lower(int n, int trials, uint64_t seed, int threads = 0);
TrialSummary preset_cef_upper(int n, int trials, uint64_t seed, int threads = 0);
TrialSummary preset_ode_check(int n, int trials, uint64_t seed, int threads = 0);
TrialSummary preset_cprop(int trials, uint64_t seed, int threads = 0);
TrialSummary preset_price_of_fairness(int k, int p, int q);
TrialSummary preset_divisible(long long n, double tol);
TrialSummary preset_cnsw(uint64_t seed, int num_instances = 500);

// Runs a preset by name with JSON-encoded parameters (unknown keys rejected);
// the single entry point the C API and CLI use.
TrialSummary run_preset(const std::string& name, const std::string& params_json);
std::vector<std::string> preset_names();

// Closed-form solution of dn1/dx = (1 + (2 n1 - 1)/x) / 2 with n1(n) = n,
// the fluid limit of the class-0 availability count on the two-class
// upper-triangular instance:
//   n1(x) = x + (x/2) ln(x/n) + (1 - x/n) / 2.
double ode_n1_closed_form(double x, double n);

}  // namespace classfair
