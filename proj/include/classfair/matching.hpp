#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "classfair/instance.hpp"

namespace classfair {

// Integral matching: each item matched to at most one agent, each agent
// saturated by at most one item, every pair on an instance edge. The
// persistent-style op `assign` returns a new value; `add` mutates in place
// (used by the online algorithms while a run is in flight).
class Matching {
 public:
  explicit Matching(const Instance& inst)
      : inst_(&inst),
        item_to_agent_(inst.num_items(), -1),
        agent_to_item_(inst.num_agents(), -1) {}

  const Instance& instance() const { return *inst_; }
  int agent_of(int item) const { return item_to_agent_[item]; }
  int item_of(int agent) const { return agent_to_item_[agent]; }
  bool item_assigned(int item) const { return item_to_agent_[item] >= 0; }
  bool agent_saturated(int agent) const { return agent_to_item_[agent] >= 0; }
  int size() const { return size_; }  // == usw

  // Throws Error(non_edge | agent_saturated | item_assigned).
  void add(int item, int agent);

  // Y_i: items matched into class i, in arrival order.
  std::vector<int> bundle(int cls) const;
  std::vector<std::vector<int>> bundles() const;
  // |Y_i| per class.
  std::vector<int> class_values() const;

  const std::vector<int>& item_assignment() const { return item_to_agent_; }

 private:
  const Instance* inst_;
  std::vector<int> item_to_agent_;
  std::vector<int> agent_to_item_;
  int size_ = 0;
};

Matching assign(const Matching& m, int item, int agent);

// True iff no edge (a, o) has a unsaturated and o unassigned.
bool is_nonwasteful(const Instance& inst, const Matching& m);

// Divisible matching with per-cell fractions. Loads are capped at 1 + kTol.
class FractionalMatching {
 public:
  static constexpr double kTol = 1e-9;

  explicit FractionalMatching(const Instance& inst)
      : inst_(&inst), agent_load_(inst.num_agents(), 0.0), item_load_(inst.num_items(), 0.0) {}

  const Instance& instance() const { return *inst_; }
  double cell(int agent, int item) const;
  double agent_load(int agent) const { return agent_load_[agent]; }
  double item_load(int item) const { return item_load_[item]; }
  const std::unordered_map<uint64_t, double>& cells() const { return cells_; }

  // Increments cells by the given shares. Throws Error(non_edge) for a share
  // off an edge, Error(validation) for a negative share or an item/agent
  // overload beyond kTol.
  void add_shares(int item, const std::vector<std::pair<int, double>>& shares);

  // Saturates an agent exactly: sets its load (and the touched cell) so the
  // row sum is exactly 1.0. Used by the divisible strategy when capping.
  void saturate_agent(int agent, int item);

  static uint64_t key(int agent, int item) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(agent)) << 32) |
           static_cast<uint32_t>(item);
  }

 private:
  const Instance* inst_;
  std::unordered_map<uint64_t, double> cells_;
  std::vector<double> agent_load_;
  std::vector<double> item_load_;
};

FractionalMatching frac_assign(const FractionalMatching& m, int item,
                               const std::vector<std::pair<int, double>>& shares);

// Total matched mass per class.
std::vector<double> class_loads(const Instance& inst, const FractionalMatching& m);

}  // namespace classfair
