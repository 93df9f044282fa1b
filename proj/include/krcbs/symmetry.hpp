#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "krcbs/conflicts.hpp"
#include "krcbs/constraints.hpp"
#include "krcbs/grid.hpp"
#include "krcbs/mdd.hpp"
#include "krcbs/path.hpp"

namespace krcbs {

struct TimedCell {
  Cell cell;
  int t = 0;
  friend bool operator==(const TimedCell&, const TimedCell&) = default;
};

int optimal_time(TimedCell p, Cell v);

ConstraintSet temporal_barrier(int agent, const std::vector<Cell>& cells, TimedCell p, int w);

// Plain barrier of width kp on `side`, plus the narrowing extension cells beyond both ends.
// `axis` is the unit direction of the line (needed when the side is a single cell).
// With a map, extension cells off the map are dropped.
ConstraintSet step_temporal_barrier(int agent, const std::vector<Cell>& side, Cell axis, TimedCell p, int kp,
                                    const GridMap* map = nullptr);

// Keeps only the (cell, time) pairs present in the diagram. With unfinished_only, a pair counts only
// if some path is there before its final arrival.
ConstraintSet restrict_to_mdd(const ConstraintSet& barrier, const Mdd& mdd, bool unfinished_only);

// Rooted rectangle: corners D and E, with (sx, sy) the directions of travel of the
// horizontal and the vertical crosser. S1/S4 are the rows through D and E, S2/S3 the columns.
struct Rect {
  Cell D;
  Cell E;
  int sx = 1;
  int sy = 1;
};

enum class Side { S1, S2, S3, S4 };

std::vector<Cell> shifted_side(const Rect& r, Side side, int l);

struct RectangleFinding {
  int a1 = 0;  // crosses the rows S1 then S4
  int a2 = 0;  // crosses the columns S2 then S3
  Rect rect;
  Cell B1, A1, B2, A2;
  int t_b1 = 0, t_b2 = 0;
  int rt1 = 0, rt2 = 0, rt = 0;
  int k1 = 0, k2 = 0, l1 = 0, l2 = 0;
  TimedCell p1, p2;
  ConstraintSet a1_entrance, a1_exit, a2_entrance, a2_exit;
  Cardinality cardinality = Cardinality::NonCardinal;
  std::vector<std::pair<int, int>> tested;  // (k1, k2) pairs examined, in order
};

using MddProvider = std::function<const Mdd&(int agent)>;

bool check_condition1(const Mdd& kmdd, const ConstraintSet& entrance, const ConstraintSet& exit);

std::optional<RectangleFinding> detect_rectangle(const Conflict& conflict, const Path& path_i, const Path& path_j,
                                                 int k, const GridMap& map, const MddProvider& kmdd);

Cardinality classify_rectangle(const RectangleFinding& f, const Mdd& kmdd_1, const Mdd& kmdd_2);

// (constraints for a1, constraints for a2)
std::pair<ConstraintSet, ConstraintSet> rectangle_branches(const RectangleFinding& f);

struct CorridorFinding {
  int a1 = 0;  // travels B -> E
  int a2 = 0;  // travels E -> B
  Cell B, E;
  std::vector<Cell> interior;
  int l = 0;
  int k = 0;
  int t1 = 0, t2 = 0;
  int t1_bypass = kForever, t2_bypass = kForever;
  int t_b = 0, t_e = 0;
  Cardinality cardinality = Cardinality::NonCardinal;

  int ub1() const;
  int ub2() const;
  // Both bounds admit a bypass arrival; the max terms are then dropped.
  bool double_bypass() const;
};

std::optional<CorridorFinding> detect_corridor(const Conflict& conflict, const GridMap& map,
                                               const std::vector<AgentTask>& tasks, const Plan& plan,
                                               const ConstraintSet& constraints, int k);

std::pair<ConstraintSet, ConstraintSet> corridor_branches(const CorridorFinding& f);

struct TargetFinding {
  int blocker = 0;
  int other = 0;
  Cell g2;
  int l = 0;
  int t = 0;
  int threshold = 0;
  Cardinality cardinality = Cardinality::NonCardinal;
};

std::optional<TargetFinding> detect_target(const Conflict& conflict, const Plan& plan,
                                           const std::vector<AgentTask>& tasks, int k);

// (late finish, early finish)
std::pair<ConstraintSet, ConstraintSet> target_branches(const TargetFinding& f, int k, int n_agents);

}  // namespace krcbs
