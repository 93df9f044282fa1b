#include "krcbs/solver.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "krcbs/lowlevel.hpp"
#include "krcbs/mdd.hpp"
#include "krcbs/symmetry.hpp"

namespace krcbs {

const char* to_string(ResolutionKind k) {
  switch (k) {
    case ResolutionKind::Rectangle:
      return "rectangle";
    case ResolutionKind::Corridor:
      return "corridor";
    case ResolutionKind::Target:
      return "target";
    default:
      return "plain";
  }
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Solved:
      return "solved";
    case Outcome::Timeout:
      return "timeout";
    default:
      return "infeasible";
  }
}

const std::vector<std::string>& variant_names() {
  static const std::vector<std::string> names{"KCBS", "KCBSH", "KCBSH-RM", "KCBSH-RM-C", "KCBSH-RM-C-T"};
  return names;
}

SolverConfig variant_config(const std::string& name) {
  SolverConfig c;
  if (name == "KCBS") {
    c.heuristic = HeuristicKind::None;
  } else if (name == "KCBSH") {
  } else if (name == "KCBSH-RM") {
    c.rectangle = true;
  } else if (name == "KCBSH-RM-C") {
    c.rectangle = c.corridor = true;
  } else if (name == "KCBSH-RM-C-T") {
    c.rectangle = c.corridor = c.target = true;
  } else {
    throw std::invalid_argument("unknown variant '" + name + "'");
  }
  return c;
}

namespace {

bool cover_within(int budget, const std::vector<std::pair<int, int>>& edges, std::vector<char>& chosen) {
  auto it = std::find_if(edges.begin(), edges.end(), [&](const auto& e) {
    return !chosen[static_cast<std::size_t>(e.first)] && !chosen[static_cast<std::size_t>(e.second)];
  });
  if (it == edges.end()) return true;
  if (budget == 0) return false;
  for (int v : {it->first, it->second}) {
    chosen[static_cast<std::size_t>(v)] = 1;
    bool ok = cover_within(budget - 1, edges, chosen);
    chosen[static_cast<std::size_t>(v)] = 0;
    if (ok) return true;
  }
  return false;
}

}  // namespace

int min_vertex_cover(int n, const std::vector<std::pair<int, int>>& edges) {
  if (edges.empty()) return 0;
  std::vector<char> touched(static_cast<std::size_t>(n), 0);
  int vertices = 0;
  for (auto [a, b] : edges)
    for (int v : {a, b})
      if (!touched[static_cast<std::size_t>(v)]) {
        touched[static_cast<std::size_t>(v)] = 1;
        ++vertices;
      }
  // Greedy maximal matching: a lower bound, and exact cover is at most twice it.
  std::vector<char> matched(static_cast<std::size_t>(n), 0);
  int matching = 0;
  for (auto [a, b] : edges)
    if (!matched[static_cast<std::size_t>(a)] && !matched[static_cast<std::size_t>(b)]) {
      matched[static_cast<std::size_t>(a)] = matched[static_cast<std::size_t>(b)] = 1;
      ++matching;
    }
  if (vertices > 16) return matching;
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);
  for (int size = matching;; ++size)
    if (cover_within(size, edges, chosen)) return size;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Candidate {
  ResolutionKind kind = ResolutionKind::Plain;
  Cardinality card = Cardinality::NonCardinal;
  Conflict conflict;
  int first = 0;  // the agent pair the branching is about
  int second = 0;
  std::vector<ConstraintSet> children;

  auto key() const {
    int rank = kind == ResolutionKind::Plain ? 3 : static_cast<int>(kind) - 1;
    return std::make_tuple(static_cast<int>(card), rank, conflict.t, conflict.a_i, conflict.a_j, conflict.delta,
                           conflict.v, static_cast<int>(conflict.kind));
  }
};

struct Node {
  std::shared_ptr<const Node> parent;
  ConstraintSet added;
  std::vector<std::shared_ptr<const Path>> paths;
  int g = 0;
  int h = 0;
  std::size_t conflicts = 0;
  long long seq = 0;
  std::optional<Candidate> best;
};
using NodePtr = std::shared_ptr<Node>;

struct OpenOrder {
  bool operator()(const NodePtr& a, const NodePtr& b) const {
    return std::make_tuple(a->g + a->h, a->h, a->conflicts, a->seq) >
           std::make_tuple(b->g + b->h, b->h, b->conflicts, b->seq);
  }
};

class Search {
 public:
  Search(const Instance& inst, const SolverConfig& cfg)
      : inst_(inst), cfg_(cfg), k_(cfg.k.value_or(inst.k)), start_(Clock::now()) {
    for (const auto& t : inst.tasks) dist_.emplace_back(inst.map, t.goal);
  }

  Solution run() {
    Solution sol;
    auto root = std::make_shared<Node>();
    root->seq = seq_++;
    for (const auto& task : inst_.tasks) {
      auto p = plan(task, {}, root->paths);
      if (!p) return finish(sol, Outcome::Infeasible, nullptr);
      root->paths.push_back(std::make_shared<const Path>(std::move(*p)));
    }
    evaluate(*root, {});
    ++stats_.ct_generated;
    std::priority_queue<NodePtr, std::vector<NodePtr>, OpenOrder> open;
    open.push(root);

    while (!open.empty()) {
      if (out_of_time()) return finish(sol, Outcome::Timeout, nullptr);
      NodePtr node = open.top();
      open.pop();
      ++stats_.ct_expanded;
      if (node->conflicts == 0) return finish(sol, Outcome::Solved, node.get());
      const Candidate& cand = *node->best;
      ++stats_.resolved[static_cast<int>(cand.kind)];

      ConstraintSet parent_cs = collect(*node);
      if (cfg_.on_branch) {
        BranchEvent ev;
        ev.kind = cand.kind;
        ev.cardinality = cand.card;
        ev.conflict = cand.conflict;
        ev.parent_constraints = parent_cs;
        ev.children = cand.children;
        ev.plan = plan_of(*node);
        cfg_.on_branch(ev);
      }
      for (const auto& added : cand.children) {
        auto child = make_child(node, parent_cs, added);
        if (!child) {
          ++stats_.ct_pruned;
          continue;
        }
        ++stats_.ct_generated;
        open.push(child);
      }
    }
    return finish(sol, Outcome::Infeasible, nullptr);
  }

 private:
  // `others` are the current paths; the agent's own entry is skipped.
  std::optional<Path> plan(const AgentTask& task, const ConstraintSet& cs, const std::vector<std::shared_ptr<const Path>>& others) {
    ConstraintTable table(inst_.map, cs, task.id, task.goal);
    ConflictAvoidance avoid(inst_.map, k_);
    for (std::size_t a = 0; a < others.size(); ++a)
      if (static_cast<int>(a) != task.id && others[a]) avoid.add(*others[a]);
    SearchStats st;
    auto p = plan_path(inst_.map, task, table, k_, dist_[static_cast<std::size_t>(task.id)], &st, &avoid);
    stats_.lowlevel_expansions += st.expansions;
    stats_.horizon_hit = stats_.horizon_hit || st.horizon_hit;
    return p;
  }

  bool out_of_time() const {
    if (cfg_.node_limit > 0 && stats_.ct_expanded >= cfg_.node_limit) return true;
    return std::chrono::duration<double>(Clock::now() - start_).count() >= cfg_.time_limit;
  }

  static ConstraintSet collect(const Node& n) {
    ConstraintSet cs;
    for (const Node* p = &n; p; p = p->parent.get()) cs.insert(cs.end(), p->added.begin(), p->added.end());
    return cs;
  }

  static Plan plan_of(const Node& n) {
    Plan out;
    for (const auto& p : n.paths) out.push_back(*p);
    return out;
  }

  NodePtr make_child(const NodePtr& parent, const ConstraintSet& parent_cs, const ConstraintSet& added) {
    auto child = std::make_shared<Node>();
    child->parent = parent;
    child->added = added;
    child->paths = parent->paths;
    child->seq = seq_++;
    ConstraintSet cs = parent_cs;
    cs.insert(cs.end(), added.begin(), added.end());
    for (const auto& task : inst_.tasks) {
      const Path& cur = *child->paths[static_cast<std::size_t>(task.id)];
      bool hit = std::any_of(added.begin(), added.end(),
                             [&](const Constraint& c) { return applies_to(c, task.id) && violates(cur, c); });
      if (!hit) continue;
      auto p = plan(task, cs, child->paths);
      if (!p) return nullptr;
      child->paths[static_cast<std::size_t>(task.id)] = std::make_shared<const Path>(std::move(*p));
    }
    evaluate(*child, cs);
    child->h = std::max(child->h, parent->g + parent->h - child->g);
    return child;
  }

  const Mdd& mdd(const Node& node, const ConstraintSet& cs, int agent, int slack,
                 std::unordered_map<int, std::string>& keys) {
    auto kit = keys.find(agent);
    if (kit == keys.end()) kit = keys.emplace(agent, constraint_key(cs, agent)).first;
    std::string key = std::to_string(agent) + "/" + std::to_string(slack) + "/" + kit->second;
    auto it = mdd_cache_.find(key);
    if (it != mdd_cache_.end()) return *it->second;
    const auto& task = inst_.tasks[static_cast<std::size_t>(agent)];
    int cost = node.paths[static_cast<std::size_t>(agent)]->cost();
    auto m = std::make_shared<const Mdd>(build_mdd(inst_.map, task, cs, cost, slack, &dist_[static_cast<std::size_t>(agent)]));
    return *mdd_cache_.emplace(std::move(key), std::move(m)).first->second;
  }

  void evaluate(Node& node, const ConstraintSet& cs) {
    if (mdd_cache_.size() > 200000) mdd_cache_.clear();
    node.g = 0;
    for (const auto& p : node.paths) node.g += p->cost();
    Plan plan = plan_of(node);
    auto conflicts = detect_conflicts(plan, k_, inst_.map);
    node.conflicts = conflicts.size();
    node.best.reset();
    if (conflicts.empty()) {
      node.h = 0;
      return;
    }
    std::unordered_map<int, std::string> keys;
    std::vector<std::pair<int, int>> edges;
    for (const auto& c : conflicts) {
      Candidate plain;
      plain.conflict = c;
      plain.first = c.a_i;
      plain.second = c.a_j;
      if (c.kind == ConflictKind::Edge) {
        plain.children = {ConstraintSet{EdgeConstraint{c.a_i, c.u, c.v, c.t}},
                          ConstraintSet{EdgeConstraint{c.a_j, c.v, c.u, c.t}}};
      } else {
        plain.children = {ConstraintSet{RangeVertex{c.a_i, c.v, c.t, c.t + k_}},
                          ConstraintSet{RangeVertex{c.a_j, c.v, c.t, c.t + k_}}};
      }
      plain.card = classify_conflict(c, mdd(node, cs, c.a_i, 0, keys), mdd(node, cs, c.a_j, 0, keys));
      Candidate chosen = plain;

      auto consider = [&](Candidate f) {
        if (f.key() < chosen.key()) chosen = std::move(f);
      };
      if (cfg_.rectangle && c.kind == ConflictKind::Vertex) {
        MddProvider provider = [&](int a) -> const Mdd& { return mdd(node, cs, a, k_, keys); };
        auto r = detect_rectangle(c, plan[static_cast<std::size_t>(c.a_i)], plan[static_cast<std::size_t>(c.a_j)], k_,
                                  inst_.map, provider);
        if (r) {
          Candidate f;
          f.kind = ResolutionKind::Rectangle;
          f.card = r->cardinality;
          f.conflict = c;
          f.first = r->a1;
          f.second = r->a2;
          auto [b1, b2] = rectangle_branches(*r);
          f.children = {b1, b2};
          consider(std::move(f));
        }
      }
      if (cfg_.corridor && c.kind == ConflictKind::Vertex) {
        auto r = detect_corridor(c, inst_.map, inst_.tasks, plan, cs, k_);
        if (r) {
          auto [b1, b2] = corridor_branches(*r);
          Candidate f;
          f.kind = ResolutionKind::Corridor;
          f.card = cardinality_of(every_path_violates(mdd(node, cs, r->a1, 0, keys), b1),
                                  every_path_violates(mdd(node, cs, r->a2, 0, keys), b2));
          f.conflict = c;
          f.first = r->a1;
          f.second = r->a2;
          f.children = {b1, b2};
          consider(std::move(f));
        }
      }
      if (cfg_.target && c.kind == ConflictKind::Vertex) {
        auto r = detect_target(c, plan, inst_.tasks, k_);
        if (r) {
          auto [late, early] = target_branches(*r, k_, inst_.num_agents());
          ConstraintSet other_side{VertexFromOn{VertexFromOn::Scope::Single, r->other, r->g2, r->t}};
          Candidate f;
          f.kind = ResolutionKind::Target;
          f.card = cardinality_of(every_path_violates(mdd(node, cs, r->blocker, 0, keys), late),
                                  every_path_violates(mdd(node, cs, r->other, 0, keys), other_side));
          f.conflict = c;
          f.first = r->blocker;
          f.second = r->other;
          f.children = {late, early};
          consider(std::move(f));
        }
      }
      if (plain.card == Cardinality::Cardinal) edges.emplace_back(plain.first, plain.second);
      else if (chosen.card == Cardinality::Cardinal) edges.emplace_back(chosen.first, chosen.second);
      if (!node.best || chosen.key() < node.best->key()) node.best = std::move(chosen);
    }
    if (cfg_.heuristic == HeuristicKind::CardinalGraph) {
      std::sort(edges.begin(), edges.end());
      edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
      node.h = min_vertex_cover(inst_.num_agents(), edges);
    } else {
      node.h = 0;
    }
  }

  Solution& finish(Solution& sol, Outcome outcome, const Node* goal) {
    sol.outcome = outcome;
    if (goal) {
      sol.plan = plan_of(*goal);
      sol.sic = goal->g;
    }
    stats_.wall_time = std::chrono::duration<double>(Clock::now() - start_).count();
    long long total = stats_.resolved_total();
    stats_.rectangle_conflict_ratio =
        total == 0 ? 0.0 : static_cast<double>(stats_.resolved[static_cast<int>(ResolutionKind::Rectangle)]) / total;
    sol.stats = stats_;
    return sol;
  }

  const Instance& inst_;
  const SolverConfig& cfg_;
  const int k_;
  const Clock::time_point start_;
  std::vector<DistanceTable> dist_;
  std::unordered_map<std::string, std::shared_ptr<const Mdd>> mdd_cache_;
  SolverStats stats_;
  long long seq_ = 0;
};

}  // namespace

Solution solve(const Instance& instance, const SolverConfig& config) {
  if (!(config.time_limit > 0)) throw std::invalid_argument("time_limit must be positive");
  Search search(instance, config);
  return search.run();
}

}  // namespace krcbs
