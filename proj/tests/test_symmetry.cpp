#include <algorithm>
#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "krcbs/conflicts.hpp"
#include "krcbs/harness.hpp"
#include "krcbs/lowlevel.hpp"
#include "krcbs/symmetry.hpp"

using namespace krcbs;
using testutil::path;

namespace {

bool has_range(const ConstraintSet& cs, Cell v, int lo, int hi) {
  return std::any_of(cs.begin(), cs.end(), [&](const Constraint& c) {
    auto* r = std::get_if<RangeVertex>(&c);
    return r && r->v == v && r->t_lo == lo && r->t_hi == hi;
  });
}

// k-MDDs for a fixed set of tasks and per-agent constraints.
struct Mdds {
  const GridMap& map;
  std::vector<AgentTask> tasks;
  ConstraintSet cs;
  int slack;
  std::map<int, Mdd> cache;
  const Mdd& operator()(int a) {
    auto it = cache.find(a);
    if (it == cache.end()) it = cache.emplace(a, build_mdd(map, tasks[static_cast<std::size_t>(a)], cs, slack)).first;
    return it->second;
  }
  MddProvider provider() {
    return [this](int a) -> const Mdd& { return (*this)(a); };
  }
};

}  // namespace

TEST_CASE("optimal time") {
  CHECK(optimal_time({{2, 3}, 5}, {4, 7}) == 11);
  CHECK(optimal_time({{0, 0}, 0}, {0, 0}) == 0);
  CHECK(optimal_time({{1, 6}, 2}, {4, 2}) == optimal_time({{4, 2}, 2}, {1, 6}));
}

TEST_CASE("temporal barriers") {
  auto one = temporal_barrier(0, {{3, 3}}, {{1, 1}, 2}, 0);
  REQUIRE(one.size() == 1);
  CHECK(has_range(one, {3, 3}, 6, 6));

  auto three = temporal_barrier(1, {{0, 2}, {1, 2}, {2, 2}}, {{0, 0}, 0}, 2);
  REQUIRE(three.size() == 3);
  for (const auto& c : three) {
    auto r = std::get<RangeVertex>(c);
    CHECK(r.agent == 1);
    CHECK(r.t_hi - r.t_lo + 1 == 3);
  }
  CHECK(has_range(three, {2, 2}, 4, 6));
}

TEST_CASE("step barriers") {
  TimedCell p{{4, 2}, 1};
  std::vector<Cell> side{{4, 2}, {5, 2}};
  CHECK(step_temporal_barrier(0, side, {1, 0}, p, 0) == temporal_barrier(0, side, p, 0));

  auto two = step_temporal_barrier(0, side, {1, 0}, p, 2);
  CHECK(two.size() == 4);
  CHECK(has_range(two, {3, 2}, 2, 2));
  CHECK(has_range(two, {6, 2}, 3, 3));

  // rt = 5, side S1 shifted by l1 = 1 to row 2, p1 = ((4,2), rt - 1), k2 = 4
  const int rt = 5;
  auto four = step_temporal_barrier(0, side, {1, 0}, {{4, 2}, rt - 1}, 4);
  CHECK(four.size() == 6);
  CHECK(has_range(four, {4, 2}, rt - 1, rt + 3));
  CHECK(has_range(four, {5, 2}, rt, rt + 4));
  CHECK(has_range(four, {2, 2}, rt + 1, rt + 1));
  CHECK(has_range(four, {3, 2}, rt, rt + 2));
  CHECK(has_range(four, {6, 2}, rt + 1, rt + 3));
  CHECK(has_range(four, {7, 2}, rt + 2, rt + 2));

  // single-cell side uses the axis; off-map cells are dropped when a map is given
  auto lone = step_temporal_barrier(0, {{0, 1}}, {0, 1}, {{0, 0}, 0}, 2);
  CHECK(has_range(lone, {0, 0}, 0, 0));
  CHECK(has_range(lone, {0, 2}, 2, 2));
  auto m = GridMap::open(3, 3);
  CHECK(step_temporal_barrier(0, {{0, 0}}, {1, 0}, {{0, 0}, 0}, 2, &m).size() == 2);
}

TEST_CASE("shifted sides") {
  Rect r{{4, 3}, {5, 4}, 1, 1};
  CHECK(shifted_side(r, Side::S1, 0) == std::vector<Cell>{{4, 3}, {5, 3}});
  CHECK(shifted_side(r, Side::S4, 0) == std::vector<Cell>{{4, 4}, {5, 4}});
  CHECK(shifted_side(r, Side::S2, 0) == std::vector<Cell>{{4, 3}, {4, 4}});
  CHECK(shifted_side(r, Side::S3, 0) == std::vector<Cell>{{5, 3}, {5, 4}});
  // k1 = 2 moves S1, S4 by one; k2 = 4 moves S2, S3 by two
  CHECK(shifted_side(r, Side::S1, 2 / 2) == std::vector<Cell>{{4, 2}, {5, 2}});
  CHECK(shifted_side(r, Side::S4, 2 / 2) == std::vector<Cell>{{4, 5}, {5, 5}});
  CHECK(shifted_side(r, Side::S2, 4 / 2) == std::vector<Cell>{{2, 3}, {2, 4}});
  CHECK(shifted_side(r, Side::S3, 4 / 2) == std::vector<Cell>{{7, 3}, {7, 4}});
  // moving back by the same amount restores the side
  Rect moved{{4, 2}, {5, 5}, 1, 1};
  CHECK(shifted_side(moved, Side::S1, 0) == shifted_side(r, Side::S1, 1));
  Rect flipped{{5, 4}, {4, 3}, -1, -1};
  CHECK(shifted_side(flipped, Side::S1, 1) == std::vector<Cell>{{5, 5}, {4, 5}});
}

TEST_CASE("rectangle detection values") {
  // agent 0 enters (3,4) moving right at t=4, agent 1 enters it moving down at t=6;
  // both are held on their first cell until t=2
  auto m = GridMap::open(7, 7);
  Plan plan{path({{1, 4}, {1, 4}, {1, 4}, {2, 4}, {3, 4}, {4, 4}, {5, 4}, {6, 4}}),
            path({{2, 1}, {2, 1}, {2, 1}, {3, 1}, {3, 2}, {3, 3}, {3, 4}, {3, 5}, {3, 6}})};
  ConstraintSet cs;
  for (Cell c : std::vector<Cell>{{0, 4}, {2, 4}, {1, 3}, {1, 5}}) cs.push_back(RangeVertex{0, c, 1, 2});
  for (Cell c : std::vector<Cell>{{1, 1}, {3, 1}, {2, 0}, {2, 2}}) cs.push_back(RangeVertex{1, c, 1, 2});
  Mdds mdds{m, {{0, {1, 4}, {6, 4}}, {1, {2, 1}, {3, 6}}}, cs, 2, {}};
  CHECK(mdds(0).cost() == plan[0].cost());
  CHECK(mdds(1).cost() == plan[1].cost());
  auto conflicts = detect_conflicts(plan, 2, m);
  REQUIRE(conflicts.size() == 1);
  CHECK(conflicts[0] == Conflict{0, 1, {3, 4}, 4, 2, ConflictKind::Vertex, {3, 4}});

  auto f = detect_rectangle(conflicts[0], plan[0], plan[1], 2, m, mdds.provider());
  REQUIRE(f);
  // a1 is the vertical crosser (agent 1), a2 the horizontal one (agent 0)
  CHECK(f->a1 == 1);
  CHECK(f->a2 == 0);
  CHECK(f->B2 == Cell{1, 4});
  CHECK(f->t_b2 == 2);
  CHECK(f->rt2 == 3);
  CHECK(f->B1 == Cell{2, 1});
  CHECK(f->t_b1 == 2);
  CHECK(f->rt1 == 5);
  CHECK(f->rt == 3);
  CHECK(f->rect.D == Cell{2, 4});
  REQUIRE_FALSE(f->tested.empty());
  CHECK(f->tested.front() == std::pair<int, int>{2, 2});
  CHECK(f->k1 == 2);
  CHECK(f->k2 == 2);
  CHECK(check_condition1(mdds(1), f->a1_entrance, f->a1_exit));
  CHECK(check_condition1(mdds(0), f->a2_entrance, f->a2_exit));
  auto [c1, c2] = rectangle_branches(*f);
  CHECK(violates_any(plan[1], c1));
  CHECK(violates_any(plan[0], c2));
}

TEST_CASE("no rectangle for opposite or equal directions") {
  auto m = GridMap::open(7, 3);
  Mdds mdds{m, {{0, {0, 1}, {6, 1}}, {1, {6, 1}, {0, 1}}}, {}, 1, {}};
  Plan head_on{*plan_path(m, mdds.tasks[0], {}), *plan_path(m, mdds.tasks[1], {})};
  auto cs = detect_conflicts(head_on, 1, m);
  REQUIRE_FALSE(cs.empty());
  CHECK_FALSE(detect_rectangle(cs[0], head_on[0], head_on[1], 1, m, mdds.provider()));

  Plan same{path({{0, 0}, {1, 0}, {2, 0}, {3, 0}}), path({{0, 1}, {0, 0}, {1, 0}, {2, 0}, {2, 1}})};
  Conflict c{0, 1, {2, 0}, 2, 1, ConflictKind::Vertex, {}};
  Mdds mdds2{m, {{0, {0, 0}, {3, 0}}, {1, {0, 1}, {2, 1}}}, {}, 1, {}};
  CHECK_FALSE(detect_rectangle(c, same[0], same[1], 1, m, mdds2.provider()));
}

TEST_CASE("open rectangle at k=0") {
  auto inst = generate_archetype({ArchetypeKind::Rectangle, 5, false}, 0);
  Mdds mdds{inst.map, inst.tasks, {}, 0, {}};
  Plan plan{*plan_path(inst.map, inst.tasks[0], {}), *plan_path(inst.map, inst.tasks[1], {})};
  auto cs = detect_conflicts(plan, 0, inst.map);
  REQUIRE_FALSE(cs.empty());
  auto f = detect_rectangle(cs[0], plan[static_cast<std::size_t>(cs[0].a_i)], plan[static_cast<std::size_t>(cs[0].a_j)], 0,
                            inst.map, mdds.provider());
  REQUIRE(f);
  CHECK(f->k1 == 0);
  CHECK(f->k2 == 0);
  CHECK(f->cardinality == Cardinality::Cardinal);
  CHECK(check_condition1(mdds(f->a1), f->a1_entrance, f->a1_exit));
  CHECK(check_condition1(mdds(f->a2), f->a2_entrance, f->a2_exit));
  auto [c1, c2] = rectangle_branches(*f);
  for (const auto* side : {&c1, &c2})
    for (const auto& c : *side) {
      auto r = std::get<RangeVertex>(c);
      CHECK(r.t_lo == r.t_hi);
    }
  CHECK(violates_any(plan[static_cast<std::size_t>(f->a1)], c1));
  CHECK(violates_any(plan[static_cast<std::size_t>(f->a2)], c2));

  // every optimal crossing of the vertical agent hits exactly one exit cell at its optimal time
  const auto& task = inst.tasks[static_cast<std::size_t>(f->a1)];
  auto all = oracle::enumerate_paths(inst.map, task, manhattan(task.start, task.goal));
  CHECK(all.size() > 10);
  for (const auto& p : all) {
    // paths running along the exit row meet several of its cells, each at its optimal time
    int hits = 0;
    for (const auto& c : c1) hits += violates(p, c);
    CHECK(hits >= 1);
  }
}

TEST_CASE("condition 1") {
  auto m = GridMap::open(5, 5);
  auto mdd = build_mdd(m, {0, {2, 0}, {2, 4}}, {}, 2);
  ConstraintSet exit{RangeVertex{0, {2, 3}, 3, 5}};
  // a single entrance cell can be walked around with the spare steps
  CHECK_FALSE(check_condition1(mdd, {RangeVertex{0, {2, 1}, 1, 1}}, exit));
  ConstraintSet wide;
  for (int x = 0; x < 5; ++x) wide.push_back(RangeVertex{0, {x, 1}, 0, 9});
  CHECK(check_condition1(mdd, wide, exit));
  CHECK(check_condition1(mdd, {}, {}));
}

TEST_CASE("rectangle with one free agent is semi-cardinal") {
  // the vertical agent may pass right of the rectangle; the wall keeps the other one inside
  auto m = testutil::grid({"........",
                           "........",
                           "........",
                           "@@@@....",
                           "........"});
  Plan plan{path({{1, 0}, {1, 1}, {1, 2}, {2, 2}, {3, 2}, {4, 2}, {5, 2}, {6, 2}}),
            path({{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}, {4, 2}, {4, 3}, {4, 4}})};
  Mdds mdds{m, {{0, {1, 0}, {6, 2}}, {1, {0, 1}, {4, 4}}}, {}, 0, {}};
  auto cs = detect_conflicts(plan, 0, m);
  REQUIRE_FALSE(cs.empty());
  CHECK(cs[0].v == Cell{1, 1});
  auto f = detect_rectangle(cs[0], plan[0], plan[1], 0, m, mdds.provider());
  REQUIRE(f);
  CHECK(f->rect.E == Cell{4, 2});
  CHECK(f->cardinality == Cardinality::SemiCardinal);
  CHECK(classify_rectangle(*f, mdds(f->a1), mdds(f->a2)) == Cardinality::SemiCardinal);
}

TEST_CASE("corridor without bypass") {
  auto inst = generate_archetype({ArchetypeKind::Corridor, 3, false}, 1);
  Plan plan{*plan_path(inst.map, inst.tasks[0], {}), *plan_path(inst.map, inst.tasks[1], {})};
  auto cs = detect_conflicts(plan, 1, inst.map);
  REQUIRE_FALSE(cs.empty());
  auto f = detect_corridor(cs[0], inst.map, inst.tasks, plan, {}, 1);
  REQUIRE(f);
  CHECK(f->interior.size() == 3);
  CHECK(f->l == 4);
  CHECK(f->t1_bypass == kForever);
  CHECK(f->t2_bypass == kForever);
  CHECK(f->ub1() == f->t2 + f->l + 1);
  CHECK(f->ub2() == f->t1 + f->l + 1);
  const auto& t1 = inst.tasks[static_cast<std::size_t>(f->a1)];
  const auto& t2 = inst.tasks[static_cast<std::size_t>(f->a2)];
  CHECK(f->t1 == testutil::oracle_cost(inst.map, {0, t1.start, f->E}, {}, 30));
  CHECK(f->t2 == testutil::oracle_cost(inst.map, {0, t2.start, f->B}, {}, 30));
  auto [c1, c2] = corridor_branches(*f);
  CHECK(violates_any(plan[static_cast<std::size_t>(f->a1)], c1));
  CHECK(violates_any(plan[static_cast<std::size_t>(f->a2)], c2));
}

TEST_CASE("corridor with a bypass") {
  auto m = testutil::grid({".........",
                           "..@@@@@..",
                           "..@@@@@..",
                           ".........",
                           "..@@@@@..",
                           "..@@@@@..",
                           "........."});
  std::vector<AgentTask> tasks{{0, {0, 3}, {8, 4}}, {1, {8, 3}, {0, 4}}};
  Plan plan{*plan_path(m, tasks[0], {}), *plan_path(m, tasks[1], {})};
  auto cs = detect_conflicts(plan, 1, m);
  REQUIRE_FALSE(cs.empty());
  auto f = detect_corridor(cs[0], m, tasks, plan, {}, 1);
  REQUIRE(f);
  CHECK(f->l == 6);
  CHECK(f->t1 == 7);
  CHECK(f->t1_bypass == f->t1 + 6);
  ConstraintSet block;
  for (Cell c : f->interior) block.push_back(RangeVertex{0, c, 0, kForever});
  const auto& t1 = tasks[static_cast<std::size_t>(f->a1)];
  CHECK(f->t1_bypass == testutil::oracle_cost(m, {0, t1.start, f->E}, block, 40));
  CHECK(f->ub1() == std::min(std::max(f->t_e + 1, f->t1 + 5), f->t2 + f->l + 1));
}

TEST_CASE("no corridor at a junction") {
  auto m = GridMap::open(5, 5);
  Plan plan{path({{0, 2}, {1, 2}, {2, 2}, {3, 2}}), path({{4, 2}, {3, 2}, {2, 2}, {1, 2}})};
  auto cs = detect_conflicts(plan, 0, m);
  REQUIRE_FALSE(cs.empty());
  CHECK_FALSE(detect_corridor(cs[0], m, {{0, {0, 2}, {3, 2}}, {1, {4, 2}, {1, 2}}}, plan, {}, 0));
}

TEST_CASE("target finding") {
  std::vector<AgentTask> tasks{{0, {1, 2}, {6, 2}}, {1, {4, 1}, {4, 2}}};
  Plan plan{path({{1, 2}, {2, 2}, {3, 2}, {4, 2}, {5, 2}, {6, 2}}), path({{4, 1}, {4, 2}})};
  auto m = GridMap::open(7, 3);
  auto cs = detect_conflicts(plan, 1, m);
  REQUIRE_FALSE(cs.empty());
  auto f = detect_target(cs[0], plan, tasks, 1);
  REQUIRE(f);
  CHECK(f->blocker == 1);
  CHECK(f->other == 0);
  CHECK(f->g2 == Cell{4, 2});
  CHECK(f->l == 1);
  CHECK(f->t == 3);
  CHECK(f->threshold == 4);
  auto [late, early] = target_branches(*f, 1, 2);
  CHECK(late == ConstraintSet{MinLength{1, 5}});
  CHECK(early == ConstraintSet{MaxLength{1, 4}, VertexFromOn{VertexFromOn::Scope::AllExcept, 1, {4, 2}, 3}});
  CHECK(violates_any(plan[1], late));
  CHECK(violates_any(plan[0], early));

  auto cs0 = detect_conflicts(plan, 0, m);
  REQUIRE_FALSE(cs0.empty());
  auto f0 = detect_target(cs0[0], plan, tasks, 0);
  REQUIRE(f0);
  auto [late0, early0] = target_branches(*f0, 0, 2);
  CHECK(late0.front() == Constraint{MinLength{1, 4}});
  CHECK(early0.front() == Constraint{MaxLength{1, 3}});
}

TEST_CASE("no target finding") {
  std::vector<AgentTask> tasks{{0, {1, 2}, {6, 2}}, {1, {4, 0}, {4, 2}}};
  auto m = GridMap::open(7, 3);
  // blocker arrives after the visit
  Plan late{path({{1, 2}, {2, 2}, {3, 2}, {4, 2}, {5, 2}, {6, 2}}), path({{4, 0}, {4, 0}, {4, 0}, {4, 0}, {4, 1}, {4, 2}})};
  auto cs = detect_conflicts(late, 2, m);
  REQUIRE_FALSE(cs.empty());
  CHECK_FALSE(detect_target(cs[0], late, tasks, 2));
  // conflict away from any goal
  Plan cross{path({{1, 2}, {2, 2}, {3, 2}, {4, 2}, {5, 2}, {6, 2}}), path({{3, 0}, {3, 1}, {3, 2}, {3, 1}})};
  std::vector<AgentTask> tasks2{{0, {1, 2}, {6, 2}}, {1, {3, 0}, {3, 1}}};
  auto cs2 = detect_conflicts(cross, 0, m);
  REQUIRE_FALSE(cs2.empty());
  CHECK_FALSE(detect_target(cs2[0], cross, tasks2, 0));
}
