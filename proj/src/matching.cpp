#include "classfair/matching.hpp"

#include <string>

#include "classfair/error.hpp"

namespace classfair {

void Matching::add(int item, int agent) {
  if (!inst_->has_edge(agent, item))
    throw Error(ErrorCode::non_edge, "(" + std::to_string(agent) + ", " + std::to_string(item) +
                                         ") is not an edge");
  if (agent_to_item_[agent] >= 0)
    throw Error(ErrorCode::agent_saturated, "agent " + std::to_string(agent) + " is saturated");
  if (item_to_agent_[item] >= 0)
    throw Error(ErrorCode::item_assigned, "item " + std::to_string(item) + " already assigned");
  item_to_agent_[item] = agent;
  agent_to_item_[agent] = item;
  ++size_;
}

std::vector<int> Matching::bundle(int cls) const {
  std::vector<int> out;
  for (int t = 0; t < static_cast<int>(item_to_agent_.size()); ++t) {
    const int a = item_to_agent_[t];
    if (a >= 0 && inst_->agent_class(a) == cls) out.push_back(t);
  }
  return out;
}

std::vector<std::vector<int>> Matching::bundles() const {
  std::vector<std::vector<int>> out(inst_->num_classes());
  for (int t = 0; t < static_cast<int>(item_to_agent_.size()); ++t) {
    const int a = item_to_agent_[t];
    if (a >= 0) out[inst_->agent_class(a)].push_back(t);
  }
  return out;
}

std::vector<int> Matching::class_values() const {
  std::vector<int> out(inst_->num_classes(), 0);
  for (int a : item_to_agent_)
    if (a >= 0) ++out[inst_->agent_class(a)];
  return out;
}

Matching assign(const Matching& m, int item, int agent) {
  Matching out = m;
  out.add(item, agent);
  return out;
}

bool is_nonwasteful(const Instance& inst, const Matching& m) {
  for (int t = 0; t < inst.num_items(); ++t) {
    if (m.item_assigned(t)) continue;
    for (int a : inst.neighbors(t)) {
      if (!m.agent_saturated(a)) return false;
    }
  }
  return true;
}

double FractionalMatching::cell(int agent, int item) const {
  auto it = cells_.find(key(agent, item));
  return it == cells_.end() ? 0.0 : it->second;
}

void FractionalMatching::add_shares(int item,
                                    const std::vector<std::pair<int, double>>& shares) {
  if (item < 0 || item >= inst_->num_items())
    throw Error(ErrorCode::invalid_argument, "item " + std::to_string(item) + " out of range");
  double total = 0.0;
  for (const auto& [agent, frac] : shares) {
    if (frac < 0.0)
      throw Error(ErrorCode::validation, "negative share for agent " + std::to_string(agent));
    if (!inst_->has_edge(agent, item))
      throw Error(ErrorCode::non_edge, "share on non-edge (" + std::to_string(agent) + ", " +
                                           std::to_string(item) + ")");
    if (agent_load_[agent] + frac > 1.0 + kTol)
      throw Error(ErrorCode::validation, "agent " + std::to_string(agent) + " overloaded");
    total += frac;
  }
  if (item_load_[item] + total > 1.0 + kTol)
    throw Error(ErrorCode::validation, "item " + std::to_string(item) + " overloaded");
  for (const auto& [agent, frac] : shares) {
    if (frac == 0.0) continue;
    cells_[key(agent, item)] += frac;
    agent_load_[agent] += frac;
  }
  item_load_[item] += total;
}

void FractionalMatching::saturate_agent(int agent, int item) {
  if (agent < 0 || agent >= inst_->num_agents() || item < 0 || item >= inst_->num_items())
    throw Error(ErrorCode::invalid_argument, "agent or item out of range");
  const double remainder = 1.0 - agent_load_[agent];
  if (remainder < -kTol)
    throw Error(ErrorCode::validation, "agent " + std::to_string(agent) + " overloaded");
  if (!inst_->has_edge(agent, item))
    throw Error(ErrorCode::non_edge, "share on non-edge (" + std::to_string(agent) + ", " +
                                         std::to_string(item) + ")");
  if (remainder > 0.0) {
    if (item_load_[item] + remainder > 1.0 + kTol)
      throw Error(ErrorCode::validation, "item " + std::to_string(item) + " overloaded");
    cells_[key(agent, item)] += remainder;
    item_load_[item] += remainder;
  }
  agent_load_[agent] = 1.0;
}

FractionalMatching frac_assign(const FractionalMatching& m, int item,
                               const std::vector<std::pair<int, double>>& shares) {
  FractionalMatching out = m;
  out.add_shares(item, shares);
  return out;
}

std::vector<double> class_loads(const Instance& inst, const FractionalMatching& m) {
  std::vector<double> out(inst.num_classes(), 0.0);
  for (int a = 0; a < inst.num_agents(); ++a) out[inst.agent_class(a)] += m.agent_load(a);
  return out;
}

}  // namespace classfair
