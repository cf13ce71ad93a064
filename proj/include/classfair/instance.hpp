#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace classfair {

// A problem instance: offline agents partitioned into classes, plus items
// whose array order is the online arrival order. Immutable after
// construction; safe to share across threads.
class Instance {
 public:
  Instance() = default;

  const std::string& name() const { return name_; }
  int num_classes() const { return num_classes_; }
  int num_agents() const { return static_cast<int>(agent_class_.size()); }
  int num_items() const { return static_cast<int>(item_neighbors_.size()); }

  int agent_class(int agent) const { return agent_class_[agent]; }
  const std::vector<int>& agent_classes() const { return agent_class_; }
  const std::vector<int>& neighbors(int item) const { return item_neighbors_[item]; }
  const std::vector<int>& class_agents(int cls) const { return class_agents_[cls]; }
  // position of the agent within class_agents(agent_class(agent))
  int class_position(int agent) const { return class_position_[agent]; }

  bool has_edge(int agent, int item) const;
  long long num_edges() const;

  friend Instance make_instance(int, std::vector<int>, std::vector<std::vector<int>>,
                                std::string);

 private:
  std::string name_;
  int num_classes_ = 0;
  std::vector<int> agent_class_;
  std::vector<std::vector<int>> item_neighbors_;
  // derived
  std::vector<std::vector<int>> class_agents_;
  std::vector<int> class_position_;
  std::vector<std::vector<int>> sorted_neighbors_;  // per item, for edge queries
};

// Validates and builds an Instance. Throws Error(validation) on: zero
// classes, out-of-range class id, empty class, invalid or duplicate neighbor.
Instance make_instance(int num_classes, std::vector<int> agent_class,
                       std::vector<std::vector<int>> item_neighbors,
                       std::string name = "");

// Single class of n agents, n items; item t is adjacent to agents {t..n-1},
// so degrees are n, n-1, ..., 1 and neighbor sets are strictly nested.
Instance gen_upper_triangular(int n);

// Two classes: class 0 carries the upper-triangular adjacency of
// gen_upper_triangular(n); class 1 has n agents and item t is additionally
// adjacent to exactly the t-th class-1 agent.
Instance gen_cef_impossibility(int n);

// Two classes of n agents, 2n items arriving in pairs. The i-th pair
// (1-based) is adjacent to class-0 agents {0..n-i} (each pair drops the
// highest-indexed remaining agent); every item is adjacent to all of class 1.
Instance gen_divisible_hardness(int n);

// k-1 classes of q agents plus a k-th class of q(k-1) agents. Phase 1:
// p(k-1)+q items adjacent to every agent. Phase 2: k-1 groups of q items,
// group i adjacent to all agents of class i, groups in class order.
Instance gen_price_of_fairness(int k, int p, int q);

// Two classes of four agents (a1..a4, b1..b4) and six items: items 1-4
// adjacent to all of class 1, item 1 additionally to a1, items 5-6 adjacent
// to a3 and a4. Ids are 0-based internally.
Instance gen_cnsw_counterexample();

// Each (agent, item) edge is included independently with probability
// edge_prob; items with no neighbors are kept. Deterministic given the seed
// (edges drawn item-major, agent-minor).
Instance gen_random_bipartite(int num_classes, int agents_per_class, int num_items,
                              double edge_prob, uint64_t seed);

// Canonical JSON form (the on-disk schema). parse_instance rejects any
// invariant violation with a message naming the offending id;
// write(parse(text)) == text for canonical text.
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& json_text);

}  // namespace classfair
