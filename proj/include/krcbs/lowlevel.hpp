#pragma once

#include <optional>
#include <vector>

#include "krcbs/constraints.hpp"
#include "krcbs/grid.hpp"
#include "krcbs/path.hpp"

namespace krcbs {

// Exact BFS distance from every cell to one goal.
class DistanceTable {
 public:
  static constexpr int kUnreachable = kForever;

  DistanceTable() = default;
  DistanceTable(const GridMap& map, Cell goal);

  int at(int idx) const { return dist_[static_cast<std::size_t>(idx)]; }
  int operator()(const GridMap& map, Cell c) const { return at(map.index(c)); }
  bool empty() const noexcept { return dist_.empty(); }

 private:
  std::vector<int> dist_;
};

struct SearchStats {
  long long expansions = 0;
  long long generated = 0;
  bool horizon_hit = false;
};

// Where other agents are, as visit windows widened by k. Used only to order states of equal f.
class ConflictAvoidance {
 public:
  ConflictAvoidance(const GridMap& map, int k);
  void add(const Path& path);
  // windows on `cell` containing t
  int count(int cell, int t) const;
  // windows on `cell` still open at t or later; staying there forever meets all of them
  int count_from(int cell, int t) const;

 private:
  struct Window {
    int lo;
    int hi;
  };
  const GridMap* map_;
  int k_;
  std::vector<std::vector<Window>> windows_;
};

// Minimum-cost path honouring every constraint that applies to task.id; nullopt if infeasible.
// horizon_hint is added to the search horizon (the solver passes k).
std::optional<Path> plan_path(const GridMap& map, const AgentTask& task, const ConstraintSet& constraints,
                              int horizon_hint = 0, const DistanceTable* heuristic = nullptr,
                              SearchStats* stats = nullptr);

std::optional<Path> plan_path(const GridMap& map, const AgentTask& task, const ConstraintTable& table,
                              int horizon_hint, const DistanceTable& heuristic, SearchStats* stats = nullptr,
                              const ConflictAvoidance* avoid = nullptr);

// Earliest t >= t0 at which `agent`, standing on `from` at t0, can occupy `target`
// while avoiding `blocked` and its vertex constraints. kForever when unreachable.
int earliest_arrival(const GridMap& map, int agent, Cell from, int t0, Cell target, const ConstraintSet& constraints,
                     const std::vector<Cell>& blocked = {});

}  // namespace krcbs
