#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "krcbs/lowlevel.hpp"

using namespace krcbs;
using testutil::oracle_cost;
using testutil::path;

TEST_CASE("unconstrained path is Manhattan") {
  auto m = GridMap::open(8, 8);
  AgentTask task{0, {1, 2}, {5, 2}};
  auto p = plan_path(m, task, {});
  REQUIRE(p);
  CHECK(p->cost() == 4);
  CHECK(p->cells.front() == Cell{1, 2});
  CHECK(p->goal() == Cell{5, 2});
}

TEST_CASE("range constraint forces a detour") {
  auto m = GridMap::open(8, 8);
  AgentTask task{0, {1, 2}, {5, 2}};
  ConstraintSet cs{RangeVertex{0, {3, 2}, 2, 4}};
  auto p = plan_path(m, task, cs);
  REQUIRE(p);
  CHECK(p->cost() == 6);
  CHECK_FALSE(violates_any(*p, cs));
  CHECK(oracle_cost(m, task, cs, 8) == 6);
}

TEST_CASE("goal is held forever") {
  auto m = GridMap::open(3, 1);
  AgentTask task{0, {0, 0}, {2, 0}};
  ConstraintSet cs{RangeVertex{0, {2, 0}, 5, 6}};
  auto p = plan_path(m, task, cs);
  REQUIRE(p);
  CHECK(p->cost() == 7);
  CHECK(oracle_cost(m, task, cs, 8) == 7);
}

TEST_CASE("length constraints") {
  auto m = GridMap::open(5, 1);
  AgentTask task{0, {0, 0}, {3, 0}};
  auto p = plan_path(m, task, {MinLength{0, 6}});
  REQUIRE(p);
  CHECK(p->cost() == 6);
  CHECK_FALSE(plan_path(m, task, {MaxLength{0, 2}}));
  CHECK(plan_path(m, task, {MaxLength{0, 3}}));
  // the goal may never be occupied from t=2 on
  CHECK_FALSE(plan_path(m, task, {VertexFromOn{VertexFromOn::Scope::Single, 0, {3, 0}, 2}}));
  // the exempt agent ignores an all-except constraint
  CHECK(plan_path(m, task, {VertexFromOn{VertexFromOn::Scope::AllExcept, 0, {3, 0}, 2}})->cost() == 3);
  // other agents' constraints are ignored
  CHECK(plan_path(m, task, {MaxLength{1, 1}})->cost() == 3);
}

TEST_CASE("edge constraint") {
  auto m = GridMap::open(2, 1);
  AgentTask task{0, {0, 0}, {1, 0}};
  auto p = plan_path(m, task, {EdgeConstraint{0, {0, 0}, {1, 0}, 1}});
  REQUIRE(p);
  CHECK(p->cost() == 2);
}

TEST_CASE("planner matches the oracle under random constraints") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 150; ++trial) {
    auto m = GridMap::open(5, 4);
    for (int i = 0; i < 3; ++i) m.set_passable({static_cast<int>(rng() % 5), static_cast<int>(rng() % 4)}, false);
    Cell s{static_cast<int>(rng() % 5), static_cast<int>(rng() % 4)};
    Cell g{static_cast<int>(rng() % 5), static_cast<int>(rng() % 4)};
    if (!m.passable(s) || !m.passable(g)) continue;
    AgentTask task{0, s, g};
    ConstraintSet cs;
    const int n = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i) {
      Cell v{static_cast<int>(rng() % 5), static_cast<int>(rng() % 4)};
      int lo = static_cast<int>(rng() % 6);
      switch (rng() % 4) {
        case 0:
        case 1:
          cs.push_back(RangeVertex{0, v, lo, lo + static_cast<int>(rng() % 3)});
          break;
        case 2:
          cs.push_back(MinLength{0, static_cast<int>(rng() % 9)});
          break;
        default:
          cs.push_back(MaxLength{0, 3 + static_cast<int>(rng() % 8)});
      }
    }
    auto p = plan_path(m, task, cs);
    int expect = oracle_cost(m, task, cs, 24);
    CAPTURE(trial);
    if (expect < 0) {
      CHECK_FALSE(p);
    } else {
      REQUIRE(p);
      CHECK(p->cost() == expect);
      CHECK_FALSE(violates_any(*p, cs));
    }
  }
}

TEST_CASE("planner matches enumeration on 1000 random range-constraint cases") {
  std::mt19937_64 rng(11);
  int compared = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int w = 3 + static_cast<int>(rng() % 6);
    const int h = 3 + static_cast<int>(rng() % 6);
    auto m = GridMap::open(w, h);
    const int blocks = static_cast<int>(rng() % static_cast<unsigned>(w * h / 6 + 1));
    for (int i = 0; i < blocks; ++i)
      m.set_passable({static_cast<int>(rng() % static_cast<unsigned>(w)), static_cast<int>(rng() % static_cast<unsigned>(h))},
                     false);
    Cell s{static_cast<int>(rng() % static_cast<unsigned>(w)), static_cast<int>(rng() % static_cast<unsigned>(h))};
    Cell g{static_cast<int>(rng() % static_cast<unsigned>(w)), static_cast<int>(rng() % static_cast<unsigned>(h))};
    if (!m.passable(s) || !m.passable(g)) continue;
    AgentTask task{0, s, g};
    ConstraintSet cs;
    const int n = static_cast<int>(rng() % 7);
    for (int i = 0; i < n; ++i) {
      Cell v{static_cast<int>(rng() % static_cast<unsigned>(w)), static_cast<int>(rng() % static_cast<unsigned>(h))};
      int lo = static_cast<int>(rng() % 8);
      cs.push_back(RangeVertex{0, v, lo, lo + static_cast<int>(rng() % 4)});
    }
    const int bound = manhattan(s, g) + 8;
    int expect = oracle_cost(m, task, cs, bound);
    auto p = plan_path(m, task, cs);
    CAPTURE(trial);
    if (expect < 0) {
      CHECK((!p || p->cost() > bound));
    } else {
      ++compared;
      REQUIRE(p);
      CHECK(p->cost() == expect);
      CHECK_FALSE(violates_any(*p, cs));
    }
  }
  CHECK(compared > 500);
}

TEST_CASE("conflict avoidance only breaks ties") {
  // a parked agent sits on the straight route; the detour of equal length goes around it
  auto m = GridMap::open(3, 3);
  AgentTask task{0, {0, 0}, {2, 2}};
  ConflictAvoidance avoid(m, 1);
  avoid.add(path({{1, 0}}));
  avoid.add(path({{2, 1}}));
  DistanceTable h(m, task.goal);
  ConstraintTable table(m, {}, 0, task.goal);
  auto p = plan_path(m, task, table, 1, h, nullptr, &avoid);
  REQUIRE(p);
  CHECK(p->cost() == 4);
  for (Cell c : p->cells) {
    CHECK(c != Cell{1, 0});
    CHECK(c != Cell{2, 1});
  }

  // when every shortest route meets the other agent the cost stays optimal
  auto row = GridMap::open(4, 1);
  ConflictAvoidance blocker(row, 1);
  blocker.add(path({{2, 0}, {2, 0}, {3, 0}}));
  DistanceTable hr(row, {3, 0});
  ConstraintTable tr(row, {}, 0, {3, 0});
  auto q = plan_path(row, AgentTask{0, {0, 0}, {3, 0}}, tr, 1, hr, nullptr, &blocker);
  REQUIRE(q);
  CHECK(q->cost() == 3);
  CHECK(blocker.count(row.index({2, 0}), 1) == 1);
  CHECK(blocker.count_from(row.index({3, 0}), 50) == 1);
  CHECK(blocker.count(row.index({0, 0}), 0) == 0);
}

TEST_CASE("earliest arrival") {
  auto open = GridMap::open(8, 8);
  CHECK(earliest_arrival(open, 0, {0, 0}, 0, {3, 0}, {}) == 3);
  CHECK(earliest_arrival(open, 0, {0, 0}, 4, {3, 0}, {}) == 7);

  auto corridor = GridMap::open(5, 1);
  CHECK(earliest_arrival(corridor, 0, {0, 0}, 0, {4, 0}, {}, {{2, 0}}) == kForever);

  // top row is a bypass; the middle row between the rooms is a width-1 corridor
  auto m = testutil::grid({"......",
                           ".@@@@.",
                           "......",
                           "@@@@@@",
                           "@@@@@@"});
  std::vector<Cell> interior{{1, 2}, {2, 2}, {3, 2}, {4, 2}};
  int direct = earliest_arrival(m, 0, {0, 1}, 0, {5, 2}, {});
  int bypass = earliest_arrival(m, 0, {0, 1}, 0, {5, 2}, {}, interior);
  CHECK(direct == 6);
  CHECK(bypass == direct + 2);
  ConstraintSet block;
  for (Cell c : interior) block.push_back(RangeVertex{0, c, 0, kForever});
  CHECK(oracle_cost(m, AgentTask{0, {0, 1}, {5, 2}}, block, 20) == bypass);

  // vertex constraints of the agent delay the arrival
  CHECK(earliest_arrival(corridor, 0, {0, 0}, 0, {4, 0}, {RangeVertex{0, {2, 0}, 0, 5}}) == 8);
}
