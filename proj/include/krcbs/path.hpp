#pragma once

#include <vector>

#include "krcbs/grid.hpp"

namespace krcbs {

// cells[t] for t in [0, cost]; the agent stays on cells.back() forever after.
struct Path {
  std::vector<Cell> cells;

  int cost() const noexcept { return static_cast<int>(cells.size()) - 1; }
  bool empty() const noexcept { return cells.empty(); }
  Cell goal() const { return cells.back(); }
  Cell at(int t) const { return t < static_cast<int>(cells.size()) ? cells[static_cast<std::size_t>(t)] : cells.back(); }

  friend bool operator==(const Path&, const Path&) = default;
};

using Plan = std::vector<Path>;

int sum_of_costs(const Plan& plan);

}  // namespace krcbs
