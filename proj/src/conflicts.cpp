#include "krcbs/conflicts.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_map>

#include "krcbs/constraints.hpp"

namespace krcbs {

std::string to_string(const Conflict& c) {
  if (c.kind == ConflictKind::Edge)
    return "<a" + std::to_string(c.a_i) + ",a" + std::to_string(c.a_j) + "," + to_string(c.u) + "<->" +
           to_string(c.v) + "," + std::to_string(c.t) + ">";
  return "<a" + std::to_string(c.a_i) + ",a" + std::to_string(c.a_j) + "," + to_string(c.v) + "," +
         std::to_string(c.t) + "," + std::to_string(c.delta) + ">";
}

const char* to_string(Cardinality c) {
  switch (c) {
    case Cardinality::Cardinal:
      return "cardinal";
    case Cardinality::SemiCardinal:
      return "semi-cardinal";
    default:
      return "non-cardinal";
  }
}

bool conflict_less(const Conflict& a, const Conflict& b) {
  return std::make_tuple(a.t, a.a_i, a.a_j, a.delta, a.v, static_cast<int>(a.kind), a.u) <
         std::make_tuple(b.t, b.a_i, b.a_j, b.delta, b.v, static_cast<int>(b.kind), b.u);
}

namespace {

struct Run {
  int agent;
  int s;
  int e;  // kForever for the final stay on the goal
};

// Occupancy runs bucketed by cell index, in agent order then time order.
std::vector<std::vector<Run>> build_runs(const Plan& plan, const GridMap& map, std::vector<int>& touched) {
  std::vector<std::vector<Run>> runs(static_cast<std::size_t>(map.size()));
  for (int a = 0; a < static_cast<int>(plan.size()); ++a) {
    const auto& cells = plan[static_cast<std::size_t>(a)].cells;
    int s = 0;
    for (int t = 1; t <= static_cast<int>(cells.size()); ++t) {
      if (t < static_cast<int>(cells.size()) && cells[static_cast<std::size_t>(t)] == cells[static_cast<std::size_t>(s)])
        continue;
      int idx = map.index(cells[static_cast<std::size_t>(s)]);
      int e = t == static_cast<int>(cells.size()) ? kForever : t - 1;
      if (runs[static_cast<std::size_t>(idx)].empty()) touched.push_back(idx);
      runs[static_cast<std::size_t>(idx)].push_back({a, s, e});
      s = t;
    }
  }
  return runs;
}

void scan_cell(const std::vector<Run>& rs, Cell v, int k, std::vector<Conflict>& out) {
  for (std::size_t x = 0; x < rs.size(); ++x) {
    for (std::size_t y = x + 1; y < rs.size(); ++y) {
      const Run* p = &rs[x];
      const Run* q = &rs[y];
      if (p->agent == q->agent) continue;
      const long long pe = static_cast<long long>(p->e) + k;
      const long long qe = static_cast<long long>(q->e) + k;
      if (!(q->s <= pe && p->s <= qe)) continue;
      if (q->s < p->s || (q->s == p->s && q->agent < p->agent)) std::swap(p, q);
      Conflict c;
      c.a_i = p->agent;
      c.a_j = q->agent;
      c.v = v;
      c.t = std::max(p->s, q->s - k);
      c.delta = q->s - c.t;
      c.kind = ConflictKind::Vertex;
      c.u = v;
      out.push_back(c);
    }
  }
}

void edge_conflicts(const Plan& plan, const GridMap& map, std::vector<Conflict>& out) {
  // (from, to, t) -> agents making that move
  std::unordered_map<long long, std::vector<int>> moves;
  const long long n = map.size();
  auto key = [n](int from, int to, int t) { return (static_cast<long long>(t) * n + from) * n + to; };
  for (int a = 0; a < static_cast<int>(plan.size()); ++a) {
    const auto& cells = plan[static_cast<std::size_t>(a)].cells;
    for (std::size_t t = 1; t < cells.size(); ++t)
      if (cells[t] != cells[t - 1])
        moves[key(map.index(cells[t - 1]), map.index(cells[t]), static_cast<int>(t))].push_back(a);
  }
  for (int a = 0; a < static_cast<int>(plan.size()); ++a) {
    const auto& cells = plan[static_cast<std::size_t>(a)].cells;
    for (std::size_t t = 1; t < cells.size(); ++t) {
      if (cells[t] == cells[t - 1]) continue;
      auto it = moves.find(key(map.index(cells[t]), map.index(cells[t - 1]), static_cast<int>(t)));
      if (it == moves.end()) continue;
      for (int b : it->second) {
        if (b <= a) continue;
        Conflict c;
        c.a_i = a;
        c.a_j = b;
        c.u = cells[t - 1];
        c.v = cells[t];
        c.t = static_cast<int>(t);
        c.delta = 0;
        c.kind = ConflictKind::Edge;
        out.push_back(c);
      }
    }
  }
}

}  // namespace

std::vector<Conflict> detect_conflicts(const Plan& plan, int k, const GridMap& map) {
  std::vector<int> touched;
  auto runs = build_runs(plan, map, touched);
  std::vector<Conflict> out;
  for (int idx : touched)
    if (runs[static_cast<std::size_t>(idx)].size() > 1) scan_cell(runs[static_cast<std::size_t>(idx)], map.cell(idx), k, out);
  if (k == 0) edge_conflicts(plan, map, out);
  std::sort(out.begin(), out.end(), conflict_less);
  return out;
}

std::vector<Conflict> detect_conflicts_parallel(const Plan& plan, int k, const GridMap& map) {
  std::vector<int> touched;
  auto runs = build_runs(plan, map, touched);
  std::vector<Conflict> out;
  const int n = static_cast<int>(touched.size());
#pragma omp parallel
  {
    std::vector<Conflict> local;
#pragma omp for schedule(dynamic, 64) nowait
    for (int i = 0; i < n; ++i) {
      int idx = touched[static_cast<std::size_t>(i)];
      if (runs[static_cast<std::size_t>(idx)].size() > 1) scan_cell(runs[static_cast<std::size_t>(idx)], map.cell(idx), k, local);
    }
#pragma omp critical
    out.insert(out.end(), local.begin(), local.end());
  }
  if (k == 0) edge_conflicts(plan, map, out);
  std::sort(out.begin(), out.end(), conflict_less);
  return out;
}

Cardinality cardinality_of(bool side_i, bool side_j) {
  if (side_i && side_j) return Cardinality::Cardinal;
  if (side_i || side_j) return Cardinality::SemiCardinal;
  return Cardinality::NonCardinal;
}

Cardinality classify_conflict(const Conflict& c, const Mdd& mdd_i, const Mdd& mdd_j) {
  if (c.kind == ConflictKind::Edge) {
    bool i = mdd_i.singleton(c.u, c.t - 1) && mdd_i.singleton(c.v, c.t);
    bool j = mdd_j.singleton(c.v, c.t - 1) && mdd_j.singleton(c.u, c.t);
    return cardinality_of(i, j);
  }
  return cardinality_of(mdd_i.singleton(c.v, c.t), mdd_j.singleton(c.v, c.t + c.delta));
}

}  // namespace krcbs
