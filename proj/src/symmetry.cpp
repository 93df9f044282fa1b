#include "krcbs/symmetry.hpp"

#include <algorithm>
#include <cstdlib>
#include <unordered_map>

#include "krcbs/lowlevel.hpp"

namespace krcbs {

int optimal_time(TimedCell p, Cell v) { return p.t + manhattan(p.cell, v); }

ConstraintSet temporal_barrier(int agent, const std::vector<Cell>& cells, TimedCell p, int w) {
  ConstraintSet out;
  for (Cell v : cells) {
    int ot = optimal_time(p, v);
    out.push_back(RangeVertex{agent, v, ot, ot + w});
  }
  return out;
}

namespace {

Cell unit(Cell d) { return {d.x > 0 ? 1 : (d.x < 0 ? -1 : 0), d.y > 0 ? 1 : (d.y < 0 ? -1 : 0)}; }
Cell operator-(Cell a, Cell b) { return {a.x - b.x, a.y - b.y}; }
Cell operator+(Cell a, Cell b) { return {a.x + b.x, a.y + b.y}; }
Cell operator*(int s, Cell a) { return {s * a.x, s * a.y}; }

}  // namespace

ConstraintSet step_temporal_barrier(int agent, const std::vector<Cell>& side, Cell axis, TimedCell p, int kp,
                                    const GridMap* map) {
  ConstraintSet out;
  if (side.empty() || kp < 0) return out;
  auto add = [&](Cell v, int w) {
    if (map && !map->in_bounds(v)) return;
    int ot = optimal_time(p, v);
    out.push_back(RangeVertex{agent, v, ot, ot + w});
  };
  for (Cell v : side) add(v, kp);
  Cell dir = side.size() >= 2 ? unit(side.back() - side.front()) : unit(axis);
  for (int d = 1; d <= kp / 2; ++d) {
    add(side.front() - d * dir, kp - 2 * d);
    add(side.back() + d * dir, kp - 2 * d);
  }
  return out;
}

ConstraintSet restrict_to_mdd(const ConstraintSet& barrier, const Mdd& mdd, bool unfinished_only) {
  ConstraintSet out;
  for (const auto& c : barrier) {
    const auto* r = std::get_if<RangeVertex>(&c);
    if (!r) {
      out.push_back(c);
      continue;
    }
    int run_start = -1;
    for (int t = std::max(0, r->t_lo); t <= r->t_hi + 1; ++t) {
      bool in = t <= r->t_hi && (unfinished_only ? mdd.contains_unfinished(r->v, t) : mdd.contains(r->v, t));
      if (in && run_start < 0) run_start = t;
      if (!in && run_start >= 0) {
        out.push_back(RangeVertex{r->agent, r->v, run_start, t - 1});
        run_start = -1;
      }
    }
  }
  return out;
}

std::vector<Cell> shifted_side(const Rect& r, Side side, int l) {
  std::vector<Cell> cells;
  const int sx = r.sx >= 0 ? 1 : -1;
  const int sy = r.sy >= 0 ? 1 : -1;
  switch (side) {
    case Side::S1:
    case Side::S4: {
      int y = side == Side::S1 ? r.D.y - sy * l : r.E.y + sy * l;
      int step = r.E.x >= r.D.x ? 1 : -1;
      for (int x = r.D.x;; x += step) {
        cells.push_back({x, y});
        if (x == r.E.x) break;
      }
      break;
    }
    case Side::S2:
    case Side::S3: {
      int x = side == Side::S2 ? r.D.x - sx * l : r.E.x + sx * l;
      int step = r.E.y >= r.D.y ? 1 : -1;
      for (int y = r.D.y;; y += step) {
        cells.push_back({x, y});
        if (y == r.E.y) break;
      }
      break;
    }
  }
  return cells;
}

bool check_condition1(const Mdd& kmdd, const ConstraintSet& entrance, const ConstraintSet& exit) {
  if (exit.empty()) return true;
  auto removed = violating_nodes(kmdd, entrance, nullptr);
  auto reach = reachable_from_roots(kmdd, removed);
  auto exits = violating_nodes(kmdd, exit, nullptr);
  for (std::size_t i = 0; i < reach.size(); ++i)
    if (reach[i] && exits[i]) return false;
  return true;
}

Cardinality classify_rectangle(const RectangleFinding& f, const Mdd& kmdd_1, const Mdd& kmdd_2) {
  return cardinality_of(every_path_violates(kmdd_1, f.a1_exit), every_path_violates(kmdd_2, f.a2_exit));
}

std::pair<ConstraintSet, ConstraintSet> rectangle_branches(const RectangleFinding& f) {
  return {f.a1_exit, f.a2_exit};
}

namespace {

struct Entry {
  int s = 0;
  int e = 0;  // kForever while parked on the goal
  Cell dir;
};

// The occupancy run of `path` at v that contains tau, and the move that started it.
std::optional<Entry> entry_of(const Path& path, Cell v, int tau) {
  int s = std::min(tau, path.cost());
  if (path.at(s) != v) return std::nullopt;
  while (s > 0 && path.at(s - 1) == v) --s;
  if (s == 0) return std::nullopt;
  int e = std::min(tau, path.cost());
  while (e < path.cost() && path.at(e + 1) == v) ++e;
  if (e == path.cost()) e = kForever;
  return Entry{s, e, v - path.at(s - 1)};
}

bool is_dir(Cell m, Cell d1, Cell d2) { return m == d1 || m == d2; }

// Earliest cell of the monotone approach to v, and when the agent left it.
std::pair<Cell, int> approach_start(const Path& path, const Entry& en, Cell d1, Cell d2) {
  int b = en.s;
  while (b > 0 && is_dir(path.at(b) - path.at(b - 1), d1, d2)) --b;
  return {path.at(b), b};
}

Cell departure_end(const Path& path, Cell v, const Entry& en, Cell d1, Cell d2) {
  if (en.e >= kForever) return v;
  int a = en.e;
  while (a < path.cost() && is_dir(path.at(a + 1) - path.at(a), d1, d2)) ++a;
  return path.at(a);
}

int closer(int a, int b, int target) { return std::abs(a - target) <= std::abs(b - target) ? a : b; }

}  // namespace

std::optional<RectangleFinding> detect_rectangle(const Conflict& conflict, const Path& path_i, const Path& path_j,
                                                 int k, const GridMap& map, const MddProvider& kmdd) {
  if (conflict.kind != ConflictKind::Vertex) return std::nullopt;
  const Cell v = conflict.v;
  auto ei = entry_of(path_i, v, conflict.t);
  auto ej = entry_of(path_j, v, conflict.t + conflict.delta);
  if (!ei || !ej) return std::nullopt;
  // Equal directions mean an earlier conflict; opposite directions are not a rectangle.
  if (ei->dir.x * ej->dir.x + ei->dir.y * ej->dir.y != 0) return std::nullopt;

  const bool i_vertical = ei->dir.y != 0;
  const Path& pv = i_vertical ? path_i : path_j;
  const Path& ph = i_vertical ? path_j : path_i;
  const Entry& ev = i_vertical ? *ei : *ej;
  const Entry& eh = i_vertical ? *ej : *ei;
  const Cell d1 = ev.dir;
  const Cell d2 = eh.dir;

  RectangleFinding f;
  f.a1 = i_vertical ? conflict.a_i : conflict.a_j;
  f.a2 = i_vertical ? conflict.a_j : conflict.a_i;
  std::tie(f.B1, f.t_b1) = approach_start(pv, ev, d1, d2);
  std::tie(f.B2, f.t_b2) = approach_start(ph, eh, d1, d2);
  f.A1 = departure_end(pv, v, ev, d1, d2);
  f.A2 = departure_end(ph, v, eh, d1, d2);

  Rect r;
  r.sx = d2.x;
  r.sy = d1.y;
  r.D = {closer(f.B1.x, f.B2.x, v.x), closer(f.B1.y, f.B2.y, v.y)};
  r.E = {closer(f.A1.x, f.A2.x, v.x), closer(f.A1.y, f.A2.y, v.y)};
  f.rect = r;
  f.rt1 = f.t_b1 + manhattan(f.B1, r.D);
  f.rt2 = f.t_b2 + manhattan(f.B2, r.D);
  f.rt = std::min(f.rt1, f.rt2);

  auto line_ok = [&](const std::vector<Cell>& cells, int l) {
    for (Cell c : cells) {
      if (!map.in_bounds(c)) return false;
      if (l > 0 && !map.passable(c)) return false;
    }
    return true;
  };

  auto attempt = [&](int k1, int k2) -> std::optional<RectangleFinding> {
    RectangleFinding c = f;
    c.k1 = k1;
    c.k2 = k2;
    c.l1 = k1 / 2;
    c.l2 = k2 / 2;
    if (c.rt - c.l1 < 0 || c.rt - c.l2 < 0) return std::nullopt;
    auto s1 = shifted_side(r, Side::S1, c.l1);
    auto s4 = shifted_side(r, Side::S4, c.l1);
    auto s2 = shifted_side(r, Side::S2, c.l2);
    auto s3 = shifted_side(r, Side::S3, c.l2);
    if (!line_ok(s1, c.l1) || !line_ok(s4, c.l1) || !line_ok(s2, c.l2) || !line_ok(s3, c.l2)) return std::nullopt;
    // The shifted sides may not pass the ends of either agent's monotone stretch.
    if ((s1.front().y - f.B1.y) * r.sy < 0 || (f.A1.y - s4.front().y) * r.sy < 0) return std::nullopt;
    if ((s2.front().x - f.B2.x) * r.sx < 0 || (f.A2.x - s3.front().x) * r.sx < 0) return std::nullopt;

    c.p1 = {{r.D.x, r.D.y - r.sy * c.l1}, c.rt - c.l1};
    c.p2 = {{r.D.x - r.sx * c.l2, r.D.y}, c.rt - c.l2};
    const Mdd& m1 = kmdd(c.a1);
    const Mdd& m2 = kmdd(c.a2);
    c.a1_entrance = restrict_to_mdd(step_temporal_barrier(c.a1, s1, {1, 0}, c.p1, k2, &map), m1, false);
    c.a1_exit = restrict_to_mdd(step_temporal_barrier(c.a1, s4, {1, 0}, c.p1, k2, &map), m1, false);
    c.a2_entrance = restrict_to_mdd(step_temporal_barrier(c.a2, s2, {0, 1}, c.p2, k1, &map), m2, false);
    c.a2_exit = restrict_to_mdd(step_temporal_barrier(c.a2, s3, {0, 1}, c.p2, k1, &map), m2, false);
    if (c.a1_entrance.empty() || c.a1_exit.empty() || c.a2_entrance.empty() || c.a2_exit.empty())
      return std::nullopt;
    if (!check_condition1(m1, c.a1_entrance, c.a1_exit) || !check_condition1(m2, c.a2_entrance, c.a2_exit))
      return std::nullopt;
    if (!violates_any(pv, c.a1_exit) || !violates_any(ph, c.a2_exit)) return std::nullopt;
    c.cardinality = classify_rectangle(c, m1, m2);
    return c;
  };

  std::vector<std::pair<int, int>> accepted;
  std::vector<RectangleFinding> found;
  for (int k1 = k; k1 >= 0; --k1) {
    for (int k2 = k; k2 >= 0; --k2) {
      bool dominated = std::any_of(accepted.begin(), accepted.end(),
                                   [&](const auto& a) { return k1 <= a.first && k2 <= a.second; });
      if (dominated) continue;
      f.tested.emplace_back(k1, k2);
      if (auto c = attempt(k1, k2)) {
        accepted.emplace_back(k1, k2);
        found.push_back(std::move(*c));
      }
    }
  }
  if (found.empty()) return std::nullopt;

  auto area = [](const RectangleFinding& c) {
    int w = std::abs(c.rect.E.x - c.rect.D.x) + 1 + 2 * c.l2;
    int h = std::abs(c.rect.E.y - c.rect.D.y) + 1 + 2 * c.l1;
    return w * h;
  };
  auto best = std::min_element(found.begin(), found.end(), [&](const auto& a, const auto& b) {
    if (a.cardinality != b.cardinality) return a.cardinality < b.cardinality;
    if (a.k1 + a.k2 != b.k1 + b.k2) return a.k1 + a.k2 > b.k1 + b.k2;
    return area(a) > area(b);
  });
  RectangleFinding out = *best;
  out.tested = f.tested;
  return out;
}

int CorridorFinding::ub1() const {
  if (double_bypass()) return std::min(t1_bypass - 1, t2 + l + k);
  return std::min(std::max(t_e + k, t1_bypass - 1), t2 + l + k);
}

int CorridorFinding::ub2() const {
  if (double_bypass()) return std::min(t2_bypass - 1, t1 + l + k);
  return std::min(std::max(t_b + k, t2_bypass - 1), t1 + l + k);
}

bool CorridorFinding::double_bypass() const {
  const int u1 = std::min(std::max(t_e + k, t1_bypass - 1), t2 + l + k);
  const int u2 = std::min(std::max(t_b + k, t2_bypass - 1), t1 + l + k);
  return t1_bypass <= u1 && t2_bypass <= u2;
}

std::optional<CorridorFinding> detect_corridor(const Conflict& conflict, const GridMap& map,
                                               const std::vector<AgentTask>& tasks, const Plan& plan,
                                               const ConstraintSet& constraints, int k) {
  if (conflict.kind != ConflictKind::Vertex) return std::nullopt;
  const Cell v = conflict.v;
  if (map.degree(v) != 2) return std::nullopt;

  auto nbrs = map.neighbors(v);
  std::vector<Cell> sides[2];
  Cell ends[2];
  for (int s = 0; s < 2; ++s) {
    Cell prev = v;
    Cell cur = nbrs[static_cast<std::size_t>(s)];
    while (map.degree(cur) == 2) {
      if (cur == v) return std::nullopt;  // a cycle has no endpoints
      sides[s].push_back(cur);
      auto nn = map.neighbors(cur);
      Cell next = nn[0] == prev ? nn[1] : nn[0];
      prev = cur;
      cur = next;
    }
    ends[s] = cur;
  }
  if (ends[0] == ends[1]) return std::nullopt;

  // Chain order B, interior..., E.
  std::vector<Cell> chain;
  chain.push_back(ends[0]);
  for (auto it = sides[0].rbegin(); it != sides[0].rend(); ++it) chain.push_back(*it);
  chain.push_back(v);
  for (Cell c : sides[1]) chain.push_back(c);
  chain.push_back(ends[1]);
  std::unordered_map<Cell, int, CellHash> pos;
  for (std::size_t i = 0; i < chain.size(); ++i) pos[chain[i]] = static_cast<int>(i);
  const int vp = pos[v];

  // +1 when heading towards E, -1 towards B, 0 if unknown.
  auto heading = [&](const Path& p, int tau) {
    int s = std::min(tau, p.cost());
    if (p.at(s) != v) return 0;
    while (s > 0 && p.at(s - 1) == v) --s;
    if (s > 0) {
      auto it = pos.find(p.at(s - 1));
      if (it == pos.end()) return 0;
      return it->second < vp ? 1 : -1;
    }
    int e = std::min(tau, p.cost());
    while (e < p.cost() && p.at(e + 1) == v) ++e;
    if (e >= p.cost()) return 0;
    auto it = pos.find(p.at(e + 1));
    if (it == pos.end()) return 0;
    return it->second > vp ? 1 : -1;
  };
  const Path& pi = plan[static_cast<std::size_t>(conflict.a_i)];
  const Path& pj = plan[static_cast<std::size_t>(conflict.a_j)];
  int hi = heading(pi, conflict.t);
  int hj = heading(pj, conflict.t + conflict.delta);
  if (hi == 0 || hj == 0 || hi == hj) return std::nullopt;

  CorridorFinding f;
  f.a1 = hi > 0 ? conflict.a_i : conflict.a_j;
  f.a2 = hi > 0 ? conflict.a_j : conflict.a_i;
  f.B = chain.front();
  f.E = chain.back();
  f.interior.assign(chain.begin() + 1, chain.end() - 1);
  f.l = static_cast<int>(chain.size()) - 1;
  f.k = k;

  const AgentTask& t1 = tasks[static_cast<std::size_t>(f.a1)];
  const AgentTask& t2 = tasks[static_cast<std::size_t>(f.a2)];
  for (Cell c : f.interior)
    if (c == t1.start || c == t1.goal || c == t2.start || c == t2.goal) return std::nullopt;

  f.t1 = earliest_arrival(map, f.a1, t1.start, 0, f.E, constraints);
  f.t2 = earliest_arrival(map, f.a2, t2.start, 0, f.B, constraints);
  if (f.t1 >= kForever || f.t2 >= kForever) return std::nullopt;
  f.t1_bypass = earliest_arrival(map, f.a1, t1.start, 0, f.E, constraints, f.interior);
  f.t2_bypass = earliest_arrival(map, f.a2, t2.start, 0, f.B, constraints, f.interior);
  f.t_b = earliest_arrival(map, f.a1, t1.start, 0, f.B, {});
  f.t_e = earliest_arrival(map, f.a2, t2.start, 0, f.E, {});

  const int ub1 = f.ub1();
  const int ub2 = f.ub2();
  if (ub1 < 0 || ub2 < 0) return std::nullopt;
  auto [c1, c2] = corridor_branches(f);
  if (!violates_any(plan[static_cast<std::size_t>(f.a1)], c1) || !violates_any(plan[static_cast<std::size_t>(f.a2)], c2))
    return std::nullopt;
  return f;
}

std::pair<ConstraintSet, ConstraintSet> corridor_branches(const CorridorFinding& f) {
  return {ConstraintSet{RangeVertex{f.a1, f.E, 0, f.ub1()}}, ConstraintSet{RangeVertex{f.a2, f.B, 0, f.ub2()}}};
}

std::optional<TargetFinding> detect_target(const Conflict& conflict, const Plan& plan,
                                           const std::vector<AgentTask>& tasks, int k) {
  if (conflict.kind != ConflictKind::Vertex) return std::nullopt;
  // Try a_j as the blocker first: its recorded visit is the later one.
  const int visit_i = conflict.t;
  const int visit_j = conflict.t + conflict.delta;
  struct Option {
    int blocker, other, visit;
  };
  for (Option o : {Option{conflict.a_j, conflict.a_i, visit_i}, Option{conflict.a_i, conflict.a_j, visit_j}}) {
    const Path& pb = plan[static_cast<std::size_t>(o.blocker)];
    if (conflict.v != tasks[static_cast<std::size_t>(o.blocker)].goal) continue;
    if (pb.cost() > o.visit) continue;
    TargetFinding f;
    f.blocker = o.blocker;
    f.other = o.other;
    f.g2 = conflict.v;
    f.l = pb.cost();
    f.t = o.visit;
    f.threshold = o.visit + k;
    return f;
  }
  return std::nullopt;
}

std::pair<ConstraintSet, ConstraintSet> target_branches(const TargetFinding& f, int k, int /*n_agents*/) {
  ConstraintSet late{MinLength{f.blocker, f.t + k + 1}};
  ConstraintSet early{MaxLength{f.blocker, f.t + k},
                      VertexFromOn{VertexFromOn::Scope::AllExcept, f.blocker, f.g2, f.t}};
  return {late, early};
}

}  // namespace krcbs
