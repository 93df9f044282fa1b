#pragma once

#include <vector>

#include "krcbs/constraints.hpp"
#include "krcbs/grid.hpp"
#include "krcbs/lowlevel.hpp"

namespace krcbs {

// One node per (cell, t, finished). A finished node is on its goal after the final arrival;
// keeping the flag separate lets length constraints be evaluated exactly on the diagram.
struct MddNode {
  Cell cell;
  int t = 0;
  bool finished = false;
  std::vector<int> children;
  std::vector<int> parents;
};

class Mdd {
 public:
  Mdd() = default;

  int agent() const noexcept { return agent_; }
  int cost() const noexcept { return cost_; }
  int slack() const noexcept { return slack_; }
  int depth() const noexcept { return cost_ + slack_; }
  Cell goal() const noexcept { return goal_; }

  const std::vector<MddNode>& nodes() const noexcept { return nodes_; }
  const std::vector<int>& level(int t) const { return levels_[static_cast<std::size_t>(t)]; }
  int terminal() const noexcept { return terminal_; }
  const std::vector<int>& roots() const noexcept { return levels_.front(); }
  std::size_t size() const noexcept { return nodes_.size(); }

  // Distinct cells at level t; beyond the depth the agent sits on its goal.
  std::vector<Cell> level_cells(int t) const;
  bool contains(Cell c, int t) const;
  bool contains_unfinished(Cell c, int t) const;
  bool singleton(Cell c, int t) const;

 private:
  friend Mdd build_mdd(const GridMap&, const AgentTask&, const ConstraintSet&, int, int, const DistanceTable*);

  int agent_ = 0;
  int cost_ = 0;
  int slack_ = 0;
  Cell goal_;
  std::vector<MddNode> nodes_;
  std::vector<std::vector<int>> levels_;
  int terminal_ = -1;
};

// All paths of cost <= cost + slack under the constraints. cost must be the constrained optimum.
Mdd build_mdd(const GridMap& map, const AgentTask& task, const ConstraintSet& constraints, int cost, int slack,
              const DistanceTable* heuristic = nullptr);
// Plans first to obtain the optimum; throws std::logic_error when the agent is infeasible.
Mdd build_mdd(const GridMap& map, const AgentTask& task, const ConstraintSet& constraints, int slack);

// Marks nodes that violate any constraint of `cs` (ignoring its agent field).
// Sets *everything to true when every path of the diagram violates cs regardless of the marks.
std::vector<char> violating_nodes(const Mdd& mdd, const ConstraintSet& cs, bool* everything);

// Nodes reachable from a root without passing through a removed node.
std::vector<char> reachable_from_roots(const Mdd& mdd, const std::vector<char>& removed);

// True iff every path in the diagram violates at least one constraint of cs.
// Edge constraints are ignored, which can only answer false more often.
bool every_path_violates(const Mdd& mdd, const ConstraintSet& cs);

}  // namespace krcbs
