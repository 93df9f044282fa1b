#include "krcbs/constraints.hpp"

#include <algorithm>
#include <numeric>

namespace krcbs {

int sum_of_costs(const Plan& plan) {
  return std::accumulate(plan.begin(), plan.end(), 0, [](int s, const Path& p) { return s + p.cost(); });
}

bool applies_to(const Constraint& c, int agent) {
  return std::visit(
      [agent](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VertexFromOn>)
          return x.scope == VertexFromOn::Scope::Single ? x.agent == agent : x.agent != agent;
        else
          return x.agent == agent;
      },
      c);
}

bool violates(const Path& path, const Constraint& c) {
  if (path.empty()) return false;
  return std::visit(
      [&path](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const int et = path.cost();
        if constexpr (std::is_same_v<T, RangeVertex>) {
          if (x.t_hi >= et && path.goal() == x.v) return true;
          for (int t = std::max(0, x.t_lo); t <= std::min(x.t_hi, et); ++t)
            if (path.cells[static_cast<std::size_t>(t)] == x.v) return true;
          return false;
        } else if constexpr (std::is_same_v<T, VertexFromOn>) {
          if (path.goal() == x.v) return true;
          for (int t = std::max(0, x.t_lo); t <= et; ++t)
            if (path.cells[static_cast<std::size_t>(t)] == x.v) return true;
          return false;
        } else if constexpr (std::is_same_v<T, MaxLength>) {
          return et > x.T;
        } else if constexpr (std::is_same_v<T, MinLength>) {
          return et < x.T;
        } else {
          return x.t >= 1 && x.t <= et && path.cells[static_cast<std::size_t>(x.t - 1)] == x.u &&
                 path.cells[static_cast<std::size_t>(x.t)] == x.v;
        }
      },
      c);
}

bool violates_any(const Path& path, const ConstraintSet& cs) {
  return std::any_of(cs.begin(), cs.end(), [&path](const Constraint& c) { return violates(path, c); });
}

namespace {
std::string time_str(int t) { return t >= kForever ? std::string("inf") : std::to_string(t); }
}  // namespace

std::string to_string(const Constraint& c) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, RangeVertex>)
          return "<a" + std::to_string(x.agent) + "," + to_string(x.v) + ",[" + std::to_string(x.t_lo) + "," +
                 time_str(x.t_hi) + "]>";
        else if constexpr (std::is_same_v<T, VertexFromOn>)
          return std::string(x.scope == VertexFromOn::Scope::Single ? "<a" : "<!a") + std::to_string(x.agent) + "," +
                 to_string(x.v) + ",[" + std::to_string(x.t_lo) + ",inf]>";
        else if constexpr (std::is_same_v<T, MaxLength>)
          return "<a" + std::to_string(x.agent) + ",et<=" + std::to_string(x.T) + ">";
        else if constexpr (std::is_same_v<T, MinLength>)
          return "<a" + std::to_string(x.agent) + ",et>=" + std::to_string(x.T) + ">";
        else
          return "<a" + std::to_string(x.agent) + "," + to_string(x.u) + "->" + to_string(x.v) + "@" +
                 std::to_string(x.t) + ">";
      },
      c);
}

std::string constraint_key(const ConstraintSet& cs, int agent) {
  std::vector<std::string> parts;
  for (const auto& c : cs)
    if (applies_to(c, agent)) parts.push_back(to_string(c));
  std::sort(parts.begin(), parts.end());
  parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
  std::string key;
  for (const auto& p : parts) key += p;
  return key;
}

ConstraintTable::ConstraintTable(const GridMap& map, const ConstraintSet& cs, int agent, Cell goal)
    : goal_(map.index(goal)) {
  int goal_hold = 0;
  for (const auto& c : cs) {
    if (!applies_to(c, agent)) continue;
    if (auto* r = std::get_if<RangeVertex>(&c)) {
      if (!map.in_bounds(r->v) || r->t_hi < r->t_lo) continue;
      int idx = map.index(r->v);
      vertex_[idx].push_back({r->t_lo, r->t_hi});
      if (r->t_hi < kForever) latest_ = std::max(latest_, r->t_hi);
      else latest_ = std::max(latest_, r->t_lo);
      if (idx == goal_) goal_hold = std::max(goal_hold, r->t_hi >= kForever ? kForever : r->t_hi + 1);
    } else if (auto* f = std::get_if<VertexFromOn>(&c)) {
      if (!map.in_bounds(f->v)) continue;
      int idx = map.index(f->v);
      vertex_[idx].push_back({f->t_lo, kForever});
      latest_ = std::max(latest_, f->t_lo);
      if (idx == goal_) goal_hold = kForever;
    } else if (auto* mx = std::get_if<MaxLength>(&c)) {
      max_length_ = std::min(max_length_, mx->T);
      latest_ = std::max(latest_, mx->T);
    } else if (auto* mn = std::get_if<MinLength>(&c)) {
      min_length_ = std::max(min_length_, mn->T);
      latest_ = std::max(latest_, mn->T);
    } else if (auto* e = std::get_if<EdgeConstraint>(&c)) {
      edges_.emplace(map.index(e->u), map.index(e->v), e->t);
      latest_ = std::max(latest_, e->t);
    }
  }
  earliest_finish_ = std::max(min_length_, goal_hold);
}

bool ConstraintTable::vertex_blocked(int cell, int t) const {
  auto it = vertex_.find(cell);
  if (it == vertex_.end()) return false;
  for (const auto& iv : it->second)
    if (t >= iv.lo && t <= iv.hi) return true;
  return false;
}

bool ConstraintTable::edge_blocked(int from, int to, int t) const {
  return !edges_.empty() && edges_.count({from, to, t}) > 0;
}

bool ConstraintTable::permanently_blocked(int cell) const {
  auto it = vertex_.find(cell);
  if (it == vertex_.end()) return false;
  for (const auto& iv : it->second)
    if (iv.hi >= kForever) return true;
  return false;
}

}  // namespace krcbs
