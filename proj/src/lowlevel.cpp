#include "krcbs/lowlevel.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace krcbs {

DistanceTable::DistanceTable(const GridMap& map, Cell goal)
    : dist_(static_cast<std::size_t>(map.size()), kUnreachable) {
  if (!map.passable(goal)) return;
  std::queue<int> q;
  dist_[static_cast<std::size_t>(map.index(goal))] = 0;
  q.push(map.index(goal));
  while (!q.empty()) {
    int cur = q.front();
    q.pop();
    for (Cell n : map.neighbors(map.cell(cur))) {
      int ni = map.index(n);
      if (dist_[static_cast<std::size_t>(ni)] == kUnreachable) {
        dist_[static_cast<std::size_t>(ni)] = dist_[static_cast<std::size_t>(cur)] + 1;
        q.push(ni);
      }
    }
  }
}

ConflictAvoidance::ConflictAvoidance(const GridMap& map, int k)
    : map_(&map), k_(k), windows_(static_cast<std::size_t>(map.size())) {}

void ConflictAvoidance::add(const Path& path) {
  if (path.empty()) return;
  int t = 0;
  while (t <= path.cost()) {
    int e = t;
    while (e < path.cost() && path.cells[static_cast<std::size_t>(e + 1)] == path.cells[static_cast<std::size_t>(t)]) ++e;
    int hi = e == path.cost() ? kForever : e + k_;
    windows_[static_cast<std::size_t>(map_->index(path.cells[static_cast<std::size_t>(t)]))].push_back({t - k_, hi});
    t = e + 1;
  }
}

int ConflictAvoidance::count(int cell, int t) const {
  int n = 0;
  for (const auto& w : windows_[static_cast<std::size_t>(cell)]) n += w.lo <= t && t <= w.hi;
  return n;
}

int ConflictAvoidance::count_from(int cell, int t) const {
  int n = 0;
  for (const auto& w : windows_[static_cast<std::size_t>(cell)]) n += w.hi >= t;
  return n;
}

namespace {

struct AStarNode {
  int cell;
  int t;
  int parent;
  bool terminal;
  int conflicts;
};

struct OpenEntry {
  int f;
  int conflicts;
  int g;
  long long seq;
  int node;
};

struct OpenOrder {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.conflicts != b.conflicts) return a.conflicts > b.conflicts;
    if (a.g != b.g) return a.g < b.g;
    return a.seq > b.seq;
  }
};

}  // namespace

std::optional<Path> plan_path(const GridMap& map, const AgentTask& task, const ConstraintTable& table,
                              int horizon_hint, const DistanceTable& h, SearchStats* stats,
                              const ConflictAvoidance* avoid) {
  SearchStats local;
  SearchStats& st = stats ? *stats : local;

  const int start = map.index(task.start);
  const int goal = map.index(task.goal);
  if (h.at(start) >= DistanceTable::kUnreachable) return std::nullopt;
  if (table.vertex_blocked(start, 0)) return std::nullopt;
  if (table.earliest_finish() >= kForever || table.earliest_finish() > table.max_length()) return std::nullopt;

  const int clamp = table.latest_timestep() + 1;
  const int horizon =
      std::max({h.at(start), clamp, table.min_length()}) + map.size() + std::max(0, horizon_hint);
  auto key = [clamp](int cell, int t) {
    return static_cast<long long>(cell) * (clamp + 1) + std::min(t, clamp);
  };
  auto heuristic = [&](int cell, int t) { return std::max(h.at(cell), table.earliest_finish() - t); };

  std::vector<AStarNode> nodes;
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;
  std::unordered_map<long long, std::pair<int, int>> best_t;  // (t, conflicts)
  std::unordered_set<long long> closed;
  long long seq = 0;

  auto conflicts_at = [&](int cell, int t) { return avoid ? avoid->count(cell, t) : 0; };
  auto push = [&](int cell, int t, int parent, bool terminal, int conflicts) {
    if (terminal && avoid) conflicts += avoid->count_from(cell, t + 1);
    nodes.push_back({cell, t, parent, terminal, conflicts});
    int f = terminal ? t : t + heuristic(cell, t);
    open.push({f, conflicts, t, seq++, static_cast<int>(nodes.size()) - 1});
    ++st.generated;
  };

  push(start, 0, -1, false, conflicts_at(start, 0));
  best_t[key(start, 0)] = {0, nodes[0].conflicts};
  if (start == goal && table.can_finish(0)) push(start, 0, 0, true, nodes[0].conflicts);

  while (!open.empty()) {
    OpenEntry top = open.top();
    open.pop();
    const AStarNode cur = nodes[static_cast<std::size_t>(top.node)];
    if (cur.terminal) {
      Path path;
      for (int id = cur.parent; id >= 0; id = nodes[static_cast<std::size_t>(id)].parent)
        path.cells.push_back(map.cell(nodes[static_cast<std::size_t>(id)].cell));
      std::reverse(path.cells.begin(), path.cells.end());
      return path;
    }
    if (!closed.insert(key(cur.cell, cur.t)).second) continue;
    ++st.expansions;
    if (cur.t >= horizon) {
      st.horizon_hit = true;
      continue;
    }

    const Cell c = map.cell(cur.cell);
    const int nt = cur.t + 1;
    for (int m = 0; m <= 4; ++m) {
      Cell n = m < 4 ? Cell{c.x + kMoves[static_cast<std::size_t>(m)].x, c.y + kMoves[static_cast<std::size_t>(m)].y} : c;
      if (!map.passable(n)) continue;
      int ni = map.index(n);
      if (h.at(ni) >= DistanceTable::kUnreachable) continue;
      if (nt + h.at(ni) > table.max_length()) continue;
      if (table.vertex_blocked(ni, nt) || table.edge_blocked(cur.cell, ni, nt)) continue;
      const int nc = cur.conflicts + conflicts_at(ni, nt);
      if (ni == goal && cur.cell != goal && table.can_finish(nt)) {
        // The terminal hangs off its own copy of the goal state, so the plain state may still be deduplicated.
        nodes.push_back({ni, nt, top.node, false, nc});
        push(ni, nt, static_cast<int>(nodes.size()) - 1, true, nc);
      }
      long long k = key(ni, nt);
      auto it = best_t.find(k);
      if (it == best_t.end() || std::pair{nt, nc} < it->second) {
        best_t[k] = {nt, nc};
        push(ni, nt, top.node, false, nc);
      }
    }
  }
  return std::nullopt;
}

std::optional<Path> plan_path(const GridMap& map, const AgentTask& task, const ConstraintSet& constraints,
                              int horizon_hint, const DistanceTable* heuristic, SearchStats* stats) {
  ConstraintTable table(map, constraints, task.id, task.goal);
  if (heuristic) return plan_path(map, task, table, horizon_hint, *heuristic, stats);
  DistanceTable h(map, task.goal);
  return plan_path(map, task, table, horizon_hint, h, stats);
}

int earliest_arrival(const GridMap& map, int agent, Cell from, int t0, Cell target, const ConstraintSet& constraints,
                     const std::vector<Cell>& blocked) {
  if (!map.passable(from) || !map.passable(target)) return kForever;
  ConstraintTable table(map, constraints, agent, target);
  std::vector<char> wall(static_cast<std::size_t>(map.size()), 0);
  for (Cell b : blocked)
    if (map.in_bounds(b)) wall[static_cast<std::size_t>(map.index(b))] = 1;
  const int tgt = map.index(target);
  if (wall[static_cast<std::size_t>(tgt)]) return kForever;

  std::vector<char> layer(static_cast<std::size_t>(map.size()), 0);
  layer[static_cast<std::size_t>(map.index(from))] = 1;
  const int settle = std::max(t0, table.latest_timestep() + 1);
  for (int t = t0;; ++t) {
    if (layer[static_cast<std::size_t>(tgt)]) return t;
    std::vector<char> next(static_cast<std::size_t>(map.size()), 0);
    bool any = false;
    for (int idx = 0; idx < map.size(); ++idx) {
      if (!layer[static_cast<std::size_t>(idx)]) continue;
      auto consider = [&](int ni) {
        if (wall[static_cast<std::size_t>(ni)] || table.vertex_blocked(ni, t + 1)) return;
        next[static_cast<std::size_t>(ni)] = 1;
        any = true;
      };
      consider(idx);
      for (Cell n : map.neighbors(map.cell(idx))) consider(map.index(n));
    }
    if (!any) return kForever;
    // Past the last constraint the reachable set only grows; once it stops growing the target is unreachable.
    if (t >= settle && next == layer) return kForever;
    layer.swap(next);
  }
}

}  // namespace krcbs
