#include "classfair/instance.hpp"

#include <algorithm>
#include <sstream>

#include "classfair/error.hpp"
#include "classfair/rng.hpp"
#include "json.hpp"

namespace classfair {

bool Instance::has_edge(int agent, int item) const {
  if (item < 0 || item >= num_items() || agent < 0 || agent >= num_agents()) return false;
  const auto& s = sorted_neighbors_[item];
  return std::binary_search(s.begin(), s.end(), agent);
}

long long Instance::num_edges() const {
  long long total = 0;
  for (const auto& nbrs : item_neighbors_) total += static_cast<long long>(nbrs.size());
  return total;
}

Instance make_instance(int num_classes, std::vector<int> agent_class,
                       std::vector<std::vector<int>> item_neighbors, std::string name) {
  if (num_classes <= 0)
    throw Error(ErrorCode::validation, "num_classes must be positive, got " +
                                           std::to_string(num_classes));
  const int num_agents = static_cast<int>(agent_class.size());
  std::vector<int> class_size(num_classes, 0);
  for (int a = 0; a < num_agents; ++a) {
    const int c = agent_class[a];
    if (c < 0 || c >= num_classes)
      throw Error(ErrorCode::validation, "agent " + std::to_string(a) + " has class " +
                                             std::to_string(c) + " outside [0, " +
                                             std::to_string(num_classes) + ")");
    ++class_size[c];
  }
  for (int c = 0; c < num_classes; ++c) {
    if (class_size[c] == 0)
      throw Error(ErrorCode::validation, "class " + std::to_string(c) + " is empty");
  }
  const int num_items = static_cast<int>(item_neighbors.size());
  for (int t = 0; t < num_items; ++t) {
    std::vector<char> seen(num_agents, 0);
    for (int a : item_neighbors[t]) {
      if (a < 0 || a >= num_agents)
        throw Error(ErrorCode::validation, "item " + std::to_string(t) +
                                               " has invalid neighbor " + std::to_string(a));
      if (seen[a])
        throw Error(ErrorCode::validation, "item " + std::to_string(t) +
                                               " lists neighbor " + std::to_string(a) +
                                               " twice");
      seen[a] = 1;
    }
  }

  Instance inst;
  inst.name_ = std::move(name);
  inst.num_classes_ = num_classes;
  inst.agent_class_ = std::move(agent_class);
  inst.item_neighbors_ = std::move(item_neighbors);
  inst.class_agents_.assign(num_classes, {});
  inst.class_position_.assign(num_agents, -1);
  for (int a = 0; a < num_agents; ++a) {
    auto& members = inst.class_agents_[inst.agent_class_[a]];
    inst.class_position_[a] = static_cast<int>(members.size());
    members.push_back(a);
  }
  inst.sorted_neighbors_ = inst.item_neighbors_;
  for (auto& s : inst.sorted_neighbors_) std::sort(s.begin(), s.end());
  return inst;
}

Instance gen_upper_triangular(int n) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "gen_upper_triangular: n must be >= 1");
  std::vector<int> agent_class(n, 0);
  std::vector<std::vector<int>> items(n);
  for (int t = 0; t < n; ++t) {
    items[t].reserve(n - t);
    for (int a = t; a < n; ++a) items[t].push_back(a);
  }
  return make_instance(1, std::move(agent_class), std::move(items),
                       "upper_triangular(n=" + std::to_string(n) + ")");
}

Instance gen_cef_impossibility(int n) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "gen_cef_impossibility: n must be >= 1");
  std::vector<int> agent_class(2 * n);
  for (int a = 0; a < n; ++a) agent_class[a] = 0;
  for (int a = n; a < 2 * n; ++a) agent_class[a] = 1;
  std::vector<std::vector<int>> items(n);
  for (int t = 0; t < n; ++t) {
    items[t].reserve(n - t + 1);
    for (int a = t; a < n; ++a) items[t].push_back(a);
    items[t].push_back(n + t);  // the unique class-1 agent for item t
  }
  return make_instance(2, std::move(agent_class), std::move(items),
                       "cef_impossibility(n=" + std::to_string(n) + ")");
}

Instance gen_divisible_hardness(int n) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "gen_divisible_hardness: n must be >= 1");
  std::vector<int> agent_class(2 * n);
  for (int a = 0; a < n; ++a) agent_class[a] = 0;
  for (int a = n; a < 2 * n; ++a) agent_class[a] = 1;
  std::vector<std::vector<int>> items(2 * n);
  for (int t = 0; t < 2 * n; ++t) {
    const int pair = t / 2 + 1;          // 1-based pair index
    const int width = n - pair + 1;      // class-0 neighbors 0..width-1
    items[t].reserve(width + n);
    for (int a = 0; a < width; ++a) items[t].push_back(a);
    for (int a = n; a < 2 * n; ++a) items[t].push_back(a);
  }
  return make_instance(2, std::move(agent_class), std::move(items),
                       "divisible_hardness(n=" + std::to_string(n) + ")");
}

Instance gen_price_of_fairness(int k, int p, int q) {
  if (k < 2) throw Error(ErrorCode::invalid_argument, "gen_price_of_fairness: k must be >= 2");
  if (p < 1) throw Error(ErrorCode::invalid_argument, "gen_price_of_fairness: p must be >= 1");
  if (q < 1) throw Error(ErrorCode::invalid_argument, "gen_price_of_fairness: q must be >= 1");
  const int num_agents = q * (k - 1) * 2;  // (k-1) classes of q, plus one of q(k-1)
  std::vector<int> agent_class(num_agents);
  int aid = 0;
  for (int c = 0; c < k - 1; ++c)
    for (int i = 0; i < q; ++i) agent_class[aid++] = c;
  for (int i = 0; i < q * (k - 1); ++i) agent_class[aid++] = k - 1;

  std::vector<int> everyone(num_agents);
  for (int a = 0; a < num_agents; ++a) everyone[a] = a;

  std::vector<std::vector<int>> items;
  items.reserve(p * (k - 1) + q + q * (k - 1));
  for (int t = 0; t < p * (k - 1) + q; ++t) items.push_back(everyone);
  for (int c = 0; c < k - 1; ++c) {
    std::vector<int> grp;
    for (int i = 0; i < q; ++i) grp.push_back(c * q + i);
    for (int i = 0; i < q; ++i) items.push_back(grp);
  }
  return make_instance(k, std::move(agent_class), std::move(items),
                       "price_of_fairness(k=" + std::to_string(k) + ",p=" + std::to_string(p) +
                           ",q=" + std::to_string(q) + ")");
}

Instance gen_cnsw_counterexample() {
  // agents 0..3 = a1..a4 (class 0), 4..7 = b1..b4 (class 1); items 0..5.
  std::vector<int> agent_class = {0, 0, 0, 0, 1, 1, 1, 1};
  std::vector<std::vector<int>> items(6);
  items[0] = {0, 4, 5, 6, 7};
  items[1] = {4, 5, 6, 7};
  items[2] = {4, 5, 6, 7};
  items[3] = {4, 5, 6, 7};
  items[4] = {2, 3};
  items[5] = {2, 3};
  return make_instance(2, std::move(agent_class), std::move(items), "cnsw_counterexample");
}

Instance gen_random_bipartite(int num_classes, int agents_per_class, int num_items,
                              double edge_prob, uint64_t seed) {
  if (num_classes < 1 || agents_per_class < 1 || num_items < 1)
    throw Error(ErrorCode::invalid_argument, "gen_random_bipartite: all counts must be >= 1");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
    throw Error(ErrorCode::invalid_argument, "gen_random_bipartite: edge_prob must be in [0,1]");
  const int num_agents = num_classes * agents_per_class;
  std::vector<int> agent_class(num_agents);
  for (int a = 0; a < num_agents; ++a) agent_class[a] = a / agents_per_class;
  Rng rng = make_rng(seed);
  std::vector<std::vector<int>> items(num_items);
  for (int t = 0; t < num_items; ++t) {
    for (int a = 0; a < num_agents; ++a) {
      if (uniform_unit(rng) < edge_prob) items[t].push_back(a);
    }
  }
  std::ostringstream nm;
  nm << "random_bipartite(k=" << num_classes << ",apc=" << agents_per_class
     << ",m=" << num_items << ",p=" << edge_prob << ",seed=" << seed << ")";
  return make_instance(num_classes, std::move(agent_class), std::move(items), nm.str());
}

std::string instance_to_json(const Instance& inst) {
  nlohmann::ordered_json j;
  j["name"] = inst.name();
  j["num_classes"] = inst.num_classes();
  auto agents = nlohmann::ordered_json::array();
  for (int a = 0; a < inst.num_agents(); ++a) {
    agents.push_back({{"id", a}, {"class", inst.agent_class(a)}});
  }
  j["agents"] = std::move(agents);
  auto items = nlohmann::ordered_json::array();
  for (int t = 0; t < inst.num_items(); ++t) {
    items.push_back({{"id", t}, {"neighbors", inst.neighbors(t)}});
  }
  j["items"] = std::move(items);
  return j.dump(2) + "\n";
}

Instance instance_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("instance JSON: ") + e.what());
  }
  try {
    const std::string name = j.at("name").get<std::string>();
    const int k = j.at("num_classes").get<int>();
    std::vector<int> agent_class;
    int expect = 0;
    for (const auto& a : j.at("agents")) {
      const int id = a.at("id").get<int>();
      if (id != expect)
        throw Error(ErrorCode::validation,
                    "agent id " + std::to_string(id) + " out of order (expected " +
                        std::to_string(expect) + ")");
      agent_class.push_back(a.at("class").get<int>());
      ++expect;
    }
    std::vector<std::vector<int>> items;
    expect = 0;
    for (const auto& it : j.at("items")) {
      const int id = it.at("id").get<int>();
      if (id != expect)
        throw Error(ErrorCode::validation,
                    "item id " + std::to_string(id) + " out of order (expected " +
                        std::to_string(expect) + ")");
      items.push_back(it.at("neighbors").get<std::vector<int>>());
      ++expect;
    }
    return make_instance(k, std::move(agent_class), std::move(items), name);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("instance JSON: ") + e.what());
  }
}

}  // namespace classfair
