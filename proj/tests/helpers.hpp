#pragma once

#include <string>
#include <vector>

#include "doctest.h"
#include "krcbs/grid.hpp"
#include "krcbs/oracle.hpp"
#include "krcbs/path.hpp"

namespace testutil {

using namespace krcbs;

// Rows top to bottom, '.' open and '@' blocked.
inline GridMap grid(const std::vector<std::string>& rows) {
  std::string text = "type octile\nheight " + std::to_string(rows.size()) + "\nwidth " +
                     std::to_string(rows.front().size()) + "\nmap\n";
  for (const auto& r : rows) text += r + "\n";
  return parse_map(text);
}

inline Path path(std::vector<Cell> cells) { return Path{std::move(cells)}; }

// Least cost accepted by the oracle's own search, or -1 when none up to `bound`.
inline int oracle_cost(const GridMap& map, const AgentTask& task, const ConstraintSet& cs, int bound) {
  oracle::PathQuery q;
  q.max_cost = bound;
  q.must_satisfy = cs;
  auto p = oracle::find_path(map, task, q);
  return p ? p->cost() : -1;
}

}  // namespace testutil

namespace doctest {
template <>
struct StringMaker<krcbs::Cell> {
  static String convert(krcbs::Cell c) { return krcbs::to_string(c).c_str(); }
};
}  // namespace doctest
