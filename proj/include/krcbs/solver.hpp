#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "krcbs/conflicts.hpp"
#include "krcbs/constraints.hpp"
#include "krcbs/grid.hpp"
#include "krcbs/path.hpp"

namespace krcbs {

enum class HeuristicKind { None, CardinalGraph };
enum class ResolutionKind { Plain = 0, Rectangle = 1, Corridor = 2, Target = 3 };

const char* to_string(ResolutionKind k);

// What the solver branched on at one expansion; `children` lists the constraints added per child,
// including children that turned out infeasible.
struct BranchEvent {
  ResolutionKind kind = ResolutionKind::Plain;
  Cardinality cardinality = Cardinality::NonCardinal;
  Conflict conflict;
  ConstraintSet parent_constraints;
  std::vector<ConstraintSet> children;
  Plan plan;
};

struct SolverConfig {
  std::optional<int> k;  // overrides Instance::k when set
  double time_limit = 60.0;
  bool rectangle = false;
  bool corridor = false;
  bool target = false;
  HeuristicKind heuristic = HeuristicKind::CardinalGraph;
  std::uint64_t seed = 0;
  long long node_limit = 0;  // 0 means unlimited
  std::function<void(const BranchEvent&)> on_branch;
};

// Named variants: KCBS, KCBSH, KCBSH-RM, KCBSH-RM-C, KCBSH-RM-C-T.
SolverConfig variant_config(const std::string& name);
const std::vector<std::string>& variant_names();

enum class Outcome { Solved, Timeout, Infeasible };
const char* to_string(Outcome o);

struct SolverStats {
  long long ct_expanded = 0;
  long long ct_generated = 0;
  long long ct_pruned = 0;  // children dropped because a replan was infeasible
  long long lowlevel_expansions = 0;
  long long resolved[4] = {0, 0, 0, 0};  // indexed by ResolutionKind
  double rectangle_conflict_ratio = 0.0;
  double wall_time = 0.0;  // seconds
  bool horizon_hit = false;

  long long resolved_total() const { return resolved[0] + resolved[1] + resolved[2] + resolved[3]; }
};

struct Solution {
  Outcome outcome = Outcome::Infeasible;
  Plan plan;
  int sic = -1;
  SolverStats stats;
};

Solution solve(const Instance& instance, const SolverConfig& config);

// Minimum vertex cover size: exact up to 16 vertices with edges, maximal matching bound beyond.
int min_vertex_cover(int n, const std::vector<std::pair<int, int>>& edges);

}  // namespace krcbs
