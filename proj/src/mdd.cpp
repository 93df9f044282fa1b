#include "krcbs/mdd.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace krcbs {

std::vector<Cell> Mdd::level_cells(int t) const {
  if (t < 0) return {};
  if (t > depth()) return {goal_};
  std::vector<Cell> cells;
  for (int id : level(t)) cells.push_back(nodes_[static_cast<std::size_t>(id)].cell);
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

bool Mdd::contains(Cell c, int t) const {
  if (t < 0) return false;
  if (t > depth()) return c == goal_;
  for (int id : level(t))
    if (nodes_[static_cast<std::size_t>(id)].cell == c) return true;
  return false;
}

bool Mdd::contains_unfinished(Cell c, int t) const {
  if (t < 0 || t > depth()) return false;
  for (int id : level(t)) {
    const auto& n = nodes_[static_cast<std::size_t>(id)];
    if (n.cell == c && !n.finished) return true;
  }
  return false;
}

bool Mdd::singleton(Cell c, int t) const {
  auto cells = level_cells(t);
  return cells.size() == 1 && cells.front() == c;
}

Mdd build_mdd(const GridMap& map, const AgentTask& task, const ConstraintSet& constraints, int cost, int slack,
              const DistanceTable* heuristic) {
  DistanceTable own;
  if (!heuristic) {
    own = DistanceTable(map, task.goal);
    heuristic = &own;
  }
  const DistanceTable& h = *heuristic;
  ConstraintTable table(map, constraints, task.id, task.goal);
  const int depth = cost + slack;
  const int goal = map.index(task.goal);
  const int start = map.index(task.start);

  // Forward pass over (cell, finished) per level, pruned by the distance bound.
  struct Raw {
    int cell;
    bool finished;
    std::vector<int> children;
  };
  std::vector<std::vector<Raw>> raw(static_cast<std::size_t>(depth) + 1);
  std::vector<std::unordered_map<int, int>> index(static_cast<std::size_t>(depth) + 1);
  auto add = [&](int t, int cell, bool finished) {
    int key = cell * 2 + (finished ? 1 : 0);
    auto& idx = index[static_cast<std::size_t>(t)];
    auto it = idx.find(key);
    if (it != idx.end()) return it->second;
    auto& lvl = raw[static_cast<std::size_t>(t)];
    lvl.push_back({cell, finished, {}});
    idx.emplace(key, static_cast<int>(lvl.size()) - 1);
    return static_cast<int>(lvl.size()) - 1;
  };
  auto feasible = [&](int cell, int t) {
    return h.at(cell) < DistanceTable::kUnreachable && t + h.at(cell) <= std::min(depth, table.max_length());
  };

  if (!table.vertex_blocked(start, 0) && feasible(start, 0)) add(0, start, false);
  if (start == goal && table.can_finish(0) && depth >= 0) add(0, start, true);
  for (int t = 0; t < depth; ++t) {
    auto& lvl = raw[static_cast<std::size_t>(t)];
    for (std::size_t i = 0; i < lvl.size(); ++i) {
      const int cell = lvl[i].cell;
      if (lvl[i].finished) {
        int c = add(t + 1, cell, true);
        raw[static_cast<std::size_t>(t)][i].children.push_back(c);
        continue;
      }
      const Cell here = map.cell(cell);
      for (int m = 0; m <= 4; ++m) {
        Cell n = m < 4 ? Cell{here.x + kMoves[static_cast<std::size_t>(m)].x, here.y + kMoves[static_cast<std::size_t>(m)].y}
                       : here;
        if (!map.passable(n)) continue;
        int ni = map.index(n);
        if (table.edge_blocked(cell, ni, t + 1)) continue;
        if (!table.vertex_blocked(ni, t + 1) && feasible(ni, t + 1)) {
          int c = add(t + 1, ni, false);
          raw[static_cast<std::size_t>(t)][i].children.push_back(c);
        }
        if (ni == goal && cell != goal && table.can_finish(t + 1)) {
          int c = add(t + 1, ni, true);
          raw[static_cast<std::size_t>(t)][i].children.push_back(c);
        }
      }
    }
  }

  // Backward pass from the single terminal (goal, depth, finished).
  std::vector<std::vector<char>> alive(static_cast<std::size_t>(depth) + 1);
  for (int t = 0; t <= depth; ++t) alive[static_cast<std::size_t>(t)].assign(raw[static_cast<std::size_t>(t)].size(), 0);
  bool has_terminal = false;
  {
    auto& idx = index[static_cast<std::size_t>(depth)];
    auto it = idx.find(goal * 2 + 1);
    if (it != idx.end()) {
      alive[static_cast<std::size_t>(depth)][static_cast<std::size_t>(it->second)] = 1;
      has_terminal = true;
    }
  }
  if (!has_terminal) throw std::logic_error("build_mdd: no path of cost <= " + std::to_string(depth));
  for (int t = depth - 1; t >= 0; --t) {
    auto& lvl = raw[static_cast<std::size_t>(t)];
    for (std::size_t i = 0; i < lvl.size(); ++i)
      for (int c : lvl[i].children)
        if (alive[static_cast<std::size_t>(t) + 1][static_cast<std::size_t>(c)]) {
          alive[static_cast<std::size_t>(t)][i] = 1;
          break;
        }
  }

  Mdd mdd;
  mdd.agent_ = task.id;
  mdd.cost_ = cost;
  mdd.slack_ = slack;
  mdd.goal_ = task.goal;
  mdd.levels_.resize(static_cast<std::size_t>(depth) + 1);
  std::vector<std::vector<int>> id_of(static_cast<std::size_t>(depth) + 1);
  for (int t = 0; t <= depth; ++t) {
    auto& lvl = raw[static_cast<std::size_t>(t)];
    id_of[static_cast<std::size_t>(t)].assign(lvl.size(), -1);
    for (std::size_t i = 0; i < lvl.size(); ++i) {
      if (!alive[static_cast<std::size_t>(t)][i]) continue;
      int id = static_cast<int>(mdd.nodes_.size());
      mdd.nodes_.push_back(MddNode{map.cell(lvl[i].cell), t, lvl[i].finished, {}, {}});
      mdd.levels_[static_cast<std::size_t>(t)].push_back(id);
      id_of[static_cast<std::size_t>(t)][i] = id;
    }
  }
  for (int t = 0; t < depth; ++t) {
    auto& lvl = raw[static_cast<std::size_t>(t)];
    for (std::size_t i = 0; i < lvl.size(); ++i) {
      int from = id_of[static_cast<std::size_t>(t)][i];
      if (from < 0) continue;
      for (int c : lvl[i].children) {
        int to = id_of[static_cast<std::size_t>(t) + 1][static_cast<std::size_t>(c)];
        if (to < 0) continue;
        mdd.nodes_[static_cast<std::size_t>(from)].children.push_back(to);
        mdd.nodes_[static_cast<std::size_t>(to)].parents.push_back(from);
      }
    }
  }
  mdd.terminal_ = mdd.levels_[static_cast<std::size_t>(depth)].front();
  return mdd;
}

Mdd build_mdd(const GridMap& map, const AgentTask& task, const ConstraintSet& constraints, int slack) {
  DistanceTable h(map, task.goal);
  auto path = plan_path(map, task, constraints, slack, &h);
  if (!path) throw std::logic_error("build_mdd: agent " + std::to_string(task.id) + " has no feasible path");
  return build_mdd(map, task, constraints, path->cost(), slack, &h);
}

std::vector<char> violating_nodes(const Mdd& mdd, const ConstraintSet& cs, bool* everything) {
  const int depth = mdd.depth();
  std::vector<char> removed(mdd.size(), 0);
  bool all = false;
  auto remove_if = [&](auto pred, int t_lo, int t_hi) {
    for (int t = std::max(0, t_lo); t <= std::min(depth, t_hi); ++t)
      for (int id : mdd.level(t))
        if (pred(mdd.nodes()[static_cast<std::size_t>(id)])) removed[static_cast<std::size_t>(id)] = 1;
  };
  for (const auto& c : cs) {
    if (auto* r = std::get_if<RangeVertex>(&c)) {
      if (r->v == mdd.goal() && r->t_hi > depth) all = true;
      remove_if([&](const MddNode& n) { return n.cell == r->v; }, r->t_lo, r->t_hi);
    } else if (auto* f = std::get_if<VertexFromOn>(&c)) {
      if (f->v == mdd.goal()) all = true;
      remove_if([&](const MddNode& n) { return n.cell == f->v; }, f->t_lo, depth);
    } else if (auto* mx = std::get_if<MaxLength>(&c)) {
      if (mx->T < 0) all = true;
      else if (mx->T < depth) remove_if([](const MddNode& n) { return !n.finished; }, mx->T, mx->T);
    } else if (auto* mn = std::get_if<MinLength>(&c)) {
      if (mn->T - 1 > depth) all = true;
      else if (mn->T >= 1) remove_if([](const MddNode& n) { return n.finished; }, mn->T - 1, mn->T - 1);
    }
  }
  if (everything) *everything = all;
  return removed;
}

std::vector<char> reachable_from_roots(const Mdd& mdd, const std::vector<char>& removed) {
  std::vector<char> seen(mdd.size(), 0);
  for (int t = 0; t <= mdd.depth(); ++t) {
    for (int id : mdd.level(t)) {
      const auto& n = mdd.nodes()[static_cast<std::size_t>(id)];
      if (removed[static_cast<std::size_t>(id)]) continue;
      bool ok = t == 0;
      for (int p : n.parents)
        if (seen[static_cast<std::size_t>(p)]) {
          ok = true;
          break;
        }
      seen[static_cast<std::size_t>(id)] = ok ? 1 : 0;
    }
  }
  return seen;
}

bool every_path_violates(const Mdd& mdd, const ConstraintSet& cs) {
  bool all = false;
  auto removed = violating_nodes(mdd, cs, &all);
  if (all) return true;
  auto seen = reachable_from_roots(mdd, removed);
  return !seen[static_cast<std::size_t>(mdd.terminal())];
}

}  // namespace krcbs
