#include "krcbs/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <unordered_map>

namespace krcbs::oracle {

namespace {

std::vector<int> bfs(const GridMap& map, Cell goal) {
  std::vector<int> d(static_cast<std::size_t>(map.size()), -1);
  if (!map.passable(goal)) return d;
  std::queue<Cell> q;
  d[static_cast<std::size_t>(map.index(goal))] = 0;
  q.push(goal);
  while (!q.empty()) {
    Cell c = q.front();
    q.pop();
    for (Cell n : map.neighbors(c))
      if (d[static_cast<std::size_t>(map.index(n))] < 0) {
        d[static_cast<std::size_t>(map.index(n))] = d[static_cast<std::size_t>(map.index(c))] + 1;
        q.push(n);
      }
  }
  return d;
}

bool adjacent_or_same(Cell a, Cell b) { return manhattan(a, b) <= 1; }

std::string describe(const Violation& v) {
  if (v.swap)
    return "agents " + std::to_string(v.a_i) + " and " + std::to_string(v.a_j) + " swap across " + to_string(v.v) +
           " at t=" + std::to_string(v.t);
  return "agents " + std::to_string(v.a_i) + " and " + std::to_string(v.a_j) + " visit " + to_string(v.v) +
         " at t=" + std::to_string(v.t) + " and t=" + std::to_string(v.t + v.delta);
}

Report fail(Violation v) {
  Report r;
  r.ok = false;
  r.violation = v;
  r.message = describe(v);
  return r;
}

Report fail(std::string message) {
  Report r;
  r.ok = false;
  r.message = std::move(message);
  return r;
}

// First instant two paths collide when executed literally (same cell, or swapping).
std::optional<Violation> first_collision(const Path& a, const Path& b, int ia, int ib) {
  const int horizon = std::max(a.cost(), b.cost()) + 1;
  for (int t = 0; t <= horizon; ++t) {
    if (a.at(t) == b.at(t)) return Violation{ia, ib, a.at(t), t, 0, false};
    if (a.at(t) != a.at(t + 1) && a.at(t) == b.at(t + 1) && a.at(t + 1) == b.at(t))
      return Violation{ia, ib, a.at(t + 1), t + 1, 0, true};
  }
  return std::nullopt;
}

}  // namespace

Report validate_k_robust(const Plan& plan, int k, const Instance& instance) {
  if (plan.size() != instance.tasks.size()) return fail("plan has " + std::to_string(plan.size()) + " paths");
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& p = plan[i];
    const auto& task = instance.tasks[i];
    if (p.empty()) return fail("agent " + std::to_string(i) + " has an empty path");
    if (p.cells.front() != task.start) return fail("agent " + std::to_string(i) + " does not start at its start");
    if (p.cells.back() != task.goal) return fail("agent " + std::to_string(i) + " does not end at its goal");
    for (std::size_t t = 0; t < p.cells.size(); ++t) {
      if (!instance.map.passable(p.cells[t]))
        return fail("agent " + std::to_string(i) + " on blocked cell at t=" + std::to_string(t));
      if (t > 0 && !adjacent_or_same(p.cells[t - 1], p.cells[t]))
        return fail("agent " + std::to_string(i) + " jumps at t=" + std::to_string(t));
    }
  }
  int horizon = 0;
  for (const auto& p : plan) horizon = std::max(horizon, p.cost());
  horizon += k;
  const int n = static_cast<int>(plan.size());
  for (int t = 0; t <= horizon; ++t)
    for (int d = 0; d <= k; ++d)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j || (d == 0 && j < i)) continue;
          if (plan[static_cast<std::size_t>(i)].at(t) == plan[static_cast<std::size_t>(j)].at(t + d))
            return fail(Violation{i, j, plan[static_cast<std::size_t>(i)].at(t), t, d, false});
        }
  if (k == 0) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (auto v = first_collision(plan[static_cast<std::size_t>(i)], plan[static_cast<std::size_t>(j)], i, j))
          return fail(*v);
  }
  return {};
}

Path apply_delays(const Path& path, const std::vector<Delay>& delays) {
  Path out;
  for (int t = 0; t <= path.cost(); ++t) {
    out.cells.push_back(path.cells[static_cast<std::size_t>(t)]);
    for (const auto& d : delays)
      if (d.t == t)
        for (int c = 0; c < d.count; ++c) out.cells.push_back(path.cells[static_cast<std::size_t>(t)]);
  }
  return out;
}

Report simulate_delays(const Plan& plan, int k, const std::vector<std::vector<Delay>>& delays,
                       const Instance& instance) {
  (void)instance;
  Plan run;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    std::vector<Delay> mine = i < delays.size() ? delays[i] : std::vector<Delay>{};
    int total = 0;
    for (const auto& d : mine) total += d.count;
    if (total > k) return fail("agent " + std::to_string(i) + " has more than k delays");
    run.push_back(apply_delays(plan[i], mine));
  }
  for (int i = 0; i < static_cast<int>(run.size()); ++i)
    for (int j = i + 1; j < static_cast<int>(run.size()); ++j)
      if (auto v = first_collision(run[static_cast<std::size_t>(i)], run[static_cast<std::size_t>(j)], i, j))
        return fail(*v);
  return {};
}

std::vector<std::vector<Delay>> delay_vectors(int cost, int k) {
  std::vector<std::vector<Delay>> out;
  std::vector<Delay> cur;
  std::function<void(int, int)> rec = [&](int from, int left) {
    out.push_back(cur);
    if (left == 0) return;
    for (int t = from; t < cost; ++t) {
      if (!cur.empty() && cur.back().t == t) {
        ++cur.back().count;
        rec(t, left - 1);
        --cur.back().count;
      } else {
        cur.push_back({t, 1});
        rec(t, left - 1);
        cur.pop_back();
      }
    }
  };
  rec(0, k);
  return out;
}

Report simulate_all_delays(const Plan& plan, int k, const Instance& instance, long long* vectors_checked) {
  (void)instance;
  long long checked = 0;
  std::vector<std::vector<Path>> delayed(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i)
    for (const auto& dv : delay_vectors(plan[i].cost(), k)) delayed[i].push_back(apply_delays(plan[i], dv));
  for (int i = 0; i < static_cast<int>(plan.size()); ++i)
    for (int j = i + 1; j < static_cast<int>(plan.size()); ++j)
      for (const auto& a : delayed[static_cast<std::size_t>(i)])
        for (const auto& b : delayed[static_cast<std::size_t>(j)]) {
          ++checked;
          if (auto v = first_collision(a, b, i, j)) {
            if (vectors_checked) *vectors_checked = checked;
            return fail(*v);
          }
        }
  if (vectors_checked) *vectors_checked = checked;
  return {};
}

bool pair_k_robust(const Path& a, const Path& b, int k) {
  const int horizon = std::max(a.cost(), b.cost()) + k;
  for (int t = 0; t <= horizon; ++t) {
    const Cell c = a.at(t);
    for (int u = std::max(0, t - k); u <= t + k; ++u)
      if (b.at(u) == c) return false;
  }
  if (k == 0) {
    const int end = std::max(a.cost(), b.cost());
    for (int t = 0; t < end; ++t)
      if (a.at(t) != a.at(t + 1) && a.at(t) == b.at(t + 1) && a.at(t + 1) == b.at(t)) return false;
  }
  return true;
}

std::vector<Path> enumerate_paths(const GridMap& map, const AgentTask& task, int cost, long long limit) {
  std::vector<Path> out;
  auto dist = bfs(map, task.goal);
  auto dist_of = [&](Cell c) { return dist[static_cast<std::size_t>(map.index(c))]; };
  if (dist_of(task.start) < 0 || dist_of(task.start) > cost) return out;
  if (cost == 0) {
    if (task.start == task.goal) out.push_back(Path{{task.start}});
    return out;
  }
  std::vector<Cell> cur{task.start};
  std::function<void(int)> rec = [&](int t) {
    if (static_cast<long long>(out.size()) >= limit) return;
    const Cell c = cur.back();
    if (t == cost) {
      if (c == task.goal && cur[cur.size() - 2] != task.goal) out.push_back(Path{cur});
      return;
    }
    std::vector<Cell> next = map.neighbors(c);
    next.push_back(c);
    for (Cell n : next) {
      int d = dist_of(n);
      if (d < 0 || t + 1 + d > cost) continue;
      if (t + 1 == cost && (n != task.goal || c == task.goal)) continue;
      cur.push_back(n);
      rec(t + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

BruteForceResult brute_force_optimal(const Instance& instance, int k, long long budget, int max_extra) {
  BruteForceResult res;
  const int n = instance.num_agents();
  std::vector<int> opt(static_cast<std::size_t>(n));
  int base = 0;
  for (int i = 0; i < n; ++i) {
    const auto& task = instance.tasks[static_cast<std::size_t>(i)];
    auto d = bfs(instance.map, task.goal);
    opt[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(instance.map.index(task.start))];
    if (opt[static_cast<std::size_t>(i)] < 0) {
      res.status = BruteForceResult::Status::NoneWithinBound;
      return res;
    }
    base += opt[static_cast<std::size_t>(i)];
  }

  std::map<std::pair<int, int>, std::vector<Path>> cache;
  auto paths_for = [&](int agent, int cost) -> const std::vector<Path>* {
    auto key = std::make_pair(agent, cost);
    auto it = cache.find(key);
    if (it == cache.end()) {
      auto v = enumerate_paths(instance.map, instance.tasks[static_cast<std::size_t>(agent)], cost, budget);
      if (static_cast<long long>(v.size()) >= budget) return nullptr;
      it = cache.emplace(key, std::move(v)).first;
    }
    return &it->second;
  };

  std::vector<const std::vector<Path>*> lists(static_cast<std::size_t>(n));
  std::vector<int> choice(static_cast<std::size_t>(n));
  bool over = false;
  std::function<bool(int)> combine = [&](int agent) -> bool {
    if (agent == n) return true;
    for (std::size_t p = 0; p < lists[static_cast<std::size_t>(agent)]->size(); ++p) {
      const Path& cand = (*lists[static_cast<std::size_t>(agent)])[p];
      bool ok = true;
      for (int prev = 0; prev < agent && ok; ++prev) {
        if (++res.pairings > budget) {
          over = true;
          return false;
        }
        ok = pair_k_robust((*lists[static_cast<std::size_t>(prev)])[static_cast<std::size_t>(choice[static_cast<std::size_t>(prev)])],
                           cand, k);
      }
      if (!ok) continue;
      choice[static_cast<std::size_t>(agent)] = static_cast<int>(p);
      if (combine(agent + 1)) return true;
      if (over) return false;
    }
    return false;
  };

  std::vector<int> extra(static_cast<std::size_t>(n), 0);
  for (int total = 0; total <= max_extra; ++total) {
    // Distribute `total` extra steps over the agents in lexicographic order.
    std::function<bool(int, int)> distribute = [&](int agent, int left) -> bool {
      if (agent == n - 1) {
        extra[static_cast<std::size_t>(agent)] = left;
        for (int i = 0; i < n; ++i) {
          lists[static_cast<std::size_t>(i)] = paths_for(i, opt[static_cast<std::size_t>(i)] + extra[static_cast<std::size_t>(i)]);
          if (!lists[static_cast<std::size_t>(i)]) {
            over = true;
            return false;
          }
          if (lists[static_cast<std::size_t>(i)]->empty()) return false;
        }
        return combine(0);
      }
      for (int e = 0; e <= left; ++e) {
        extra[static_cast<std::size_t>(agent)] = e;
        if (distribute(agent + 1, left - e)) return true;
        if (over) return false;
      }
      return false;
    };
    if (n == 0) {
      res.status = BruteForceResult::Status::Optimal;
      res.sic = 0;
      return res;
    }
    if (distribute(0, total)) {
      res.status = BruteForceResult::Status::Optimal;
      res.sic = base + total;
      for (int i = 0; i < n; ++i)
        res.plan.push_back((*lists[static_cast<std::size_t>(i)])[static_cast<std::size_t>(choice[static_cast<std::size_t>(i)])]);
      return res;
    }
    if (over) {
      res.status = BruteForceResult::Status::OutOfBudget;
      return res;
    }
  }
  res.status = BruteForceResult::Status::NoneWithinBound;
  return res;
}

namespace {

// Shared machinery of find_path and enumerate_constrained.
class Checker {
 public:
  Checker(const GridMap& map, const AgentTask& task, const PathQuery& q) : map_(map), task_(task), q_(q) {
    dist_ = bfs(map, task.goal);
    for (const auto& c : q.must_satisfy) {
      if (!applies_to(c, task.id)) continue;
      if (auto* mx = std::get_if<MaxLength>(&c)) max_len_ = std::min(max_len_, mx->T);
      if (auto* mn = std::get_if<MinLength>(&c)) min_len_ = std::max(min_len_, mn->T);
      if (std::holds_alternative<RangeVertex>(c) || std::holds_alternative<VertexFromOn>(c) ||
          std::holds_alternative<EdgeConstraint>(c))
        own_.push_back(c);
    }
  }

  int dist(Cell c) const { return dist_[static_cast<std::size_t>(map_.index(c))]; }
  int groups() const { return static_cast<int>(q_.must_violate.size()); }
  unsigned full() const { return (1u << groups()) - 1u; }

  static bool covers(const Constraint& c, Cell v, int t) {
    if (auto* r = std::get_if<RangeVertex>(&c)) return r->v == v && t >= r->t_lo && t <= r->t_hi;
    if (auto* f = std::get_if<VertexFromOn>(&c)) return f->v == v && t >= f->t_lo;
    return false;
  }

  // Is standing on v at t allowed?
  bool vertex_ok(Cell v, int t) const {
    for (const auto& c : own_)
      if (covers(c, v, t)) return false;
    for (const auto& p : q_.avoid)
      for (int u = std::max(0, t - q_.k); u <= t + q_.k; ++u)
        if (p.at(u) == v) return false;
    return true;
  }

  // Is the move u -> v arriving at t allowed?
  bool move_ok(Cell u, Cell v, int t) const {
    for (const auto& c : own_)
      if (auto* e = std::get_if<EdgeConstraint>(&c); e && e->u == u && e->v == v && e->t == t) return false;
    if (q_.k == 0 && u != v)
      for (const auto& p : q_.avoid)
        if (p.at(t - 1) == v && p.at(t) == u) return false;
    return true;
  }

  unsigned mark(Cell v, int t) const {
    unsigned m = 0;
    for (int g = 0; g < groups(); ++g)
      for (const auto& c : q_.must_violate[static_cast<std::size_t>(g)])
        if (covers(c, v, t)) {
          m |= 1u << g;
          break;
        }
    return m;
  }

  // Can the agent finish at time c, and which groups does staying on the goal forever violate?
  bool finish_ok(int c, unsigned& m) const {
    if (c < min_len_ || c > max_len_) return false;
    const Cell g = task_.goal;
    for (const auto& con : own_) {
      if (auto* r = std::get_if<RangeVertex>(&con); r && r->v == g && r->t_hi >= c) return false;
      if (auto* f = std::get_if<VertexFromOn>(&con); f && f->v == g) return false;
    }
    for (const auto& p : q_.avoid) {
      if (p.goal() == g) return false;
      for (int u = std::max(0, c - q_.k); u <= p.cost(); ++u)
        if (p.at(u) == g) return false;
    }
    for (int gi = 0; gi < groups(); ++gi)
      for (const auto& con : q_.must_violate[static_cast<std::size_t>(gi)]) {
        bool hit = false;
        if (auto* r = std::get_if<RangeVertex>(&con)) hit = r->v == g && r->t_hi >= c;
        else if (auto* f = std::get_if<VertexFromOn>(&con)) hit = f->v == g;
        else if (auto* mx = std::get_if<MaxLength>(&con)) hit = c > mx->T;
        else if (auto* mn = std::get_if<MinLength>(&con)) hit = c < mn->T;
        if (hit) {
          m |= 1u << gi;
          break;
        }
      }
    return true;
  }

  std::vector<Cell> successors(Cell c) const {
    std::vector<Cell> next = map_.neighbors(c);
    next.push_back(c);
    return next;
  }

 private:
  const GridMap& map_;
  const AgentTask& task_;
  const PathQuery& q_;
  std::vector<int> dist_;
  std::vector<Constraint> own_;
  int min_len_ = 0;
  int max_len_ = kForever;
};

}  // namespace

std::optional<Path> find_path(const GridMap& map, const AgentTask& task, const PathQuery& query) {
  Checker ck(map, task, query);
  if (ck.dist(task.start) < 0 || !ck.vertex_ok(task.start, 0)) return std::nullopt;
  // layers[t]: (cell index, mask) -> parent key in layer t-1
  using Key = long long;
  const int groups = ck.groups();
  auto key = [&](Cell c, unsigned m) { return static_cast<Key>(map.index(c)) * (1 << groups) + m; };
  auto cell_of = [&](Key k) { return map.cell(static_cast<int>(k >> groups)); };
  std::vector<std::map<Key, Key>> layers(1);
  unsigned m0 = ck.mark(task.start, 0);
  layers[0][key(task.start, m0)] = -1;

  auto build = [&](int t, Key last) {
    Path p;
    for (int s = t; s >= 0; --s) {
      p.cells.push_back(cell_of(last));
      last = layers[static_cast<std::size_t>(s)][last];
    }
    std::reverse(p.cells.begin(), p.cells.end());
    return p;
  };

  if (task.start == task.goal) {
    unsigned m = m0;
    if (ck.finish_ok(0, m) && m == ck.full()) return Path{{task.start}};
  }
  for (int t = 0; t < query.max_cost; ++t) {
    layers.emplace_back();
    for (const auto& [k, parent] : layers[static_cast<std::size_t>(t)]) {
      (void)parent;
      const Cell c = cell_of(k);
      const unsigned m = static_cast<unsigned>(k & ((1 << groups) - 1));
      for (Cell n : ck.successors(c)) {
        int d = ck.dist(n);
        if (d < 0 || t + 1 + d > query.max_cost) continue;
        if (!ck.vertex_ok(n, t + 1) || !ck.move_ok(c, n, t + 1)) continue;
        unsigned nm = m | ck.mark(n, t + 1);
        Key nk = key(n, nm);
        if (n == task.goal && c != task.goal) {
          unsigned fm = nm;
          if (ck.finish_ok(t + 1, fm) && fm == ck.full()) {
            layers[static_cast<std::size_t>(t) + 1].emplace(nk, k);
            Path p = build(t, k);
            p.cells.push_back(n);
            return p;
          }
        }
        layers[static_cast<std::size_t>(t) + 1].emplace(nk, k);
      }
    }
  }
  return std::nullopt;
}

std::vector<Path> enumerate_constrained(const GridMap& map, const AgentTask& task, const PathQuery& query,
                                        long long limit) {
  std::vector<Path> out;
  Checker ck(map, task, query);
  if (ck.dist(task.start) < 0 || !ck.vertex_ok(task.start, 0)) return out;
  std::vector<Cell> cur{task.start};
  unsigned m0 = ck.mark(task.start, 0);
  if (task.start == task.goal) {
    unsigned m = m0;
    if (ck.finish_ok(0, m) && m == ck.full()) out.push_back(Path{cur});
  }
  std::function<void(int, unsigned)> rec = [&](int t, unsigned m) {
    if (static_cast<long long>(out.size()) >= limit || t >= query.max_cost) return;
    const Cell c = cur.back();
    for (Cell n : ck.successors(c)) {
      int d = ck.dist(n);
      if (d < 0 || t + 1 + d > query.max_cost) continue;
      if (!ck.vertex_ok(n, t + 1) || !ck.move_ok(c, n, t + 1)) continue;
      unsigned nm = m | ck.mark(n, t + 1);
      cur.push_back(n);
      if (n == task.goal && c != task.goal) {
        unsigned fm = nm;
        if (ck.finish_ok(t + 1, fm) && fm == ck.full()) out.push_back(Path{cur});
      }
      rec(t + 1, nm);
      cur.pop_back();
    }
  };
  rec(0, m0);
  return out;
}

}  // namespace krcbs::oracle
