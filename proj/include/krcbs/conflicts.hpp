#pragma once

#include <string>
#include <vector>

#include "krcbs/grid.hpp"
#include "krcbs/mdd.hpp"
#include "krcbs/path.hpp"

namespace krcbs {

enum class ConflictKind { Vertex, Edge };

// a_i occupies v at t, a_j occupies v at t + delta.
// Edge kind (k = 0 only): a_i moves u -> v and a_j moves v -> u, both arriving at t.
struct Conflict {
  int a_i = 0;
  int a_j = 0;
  Cell v;
  int t = 0;
  int delta = 0;
  ConflictKind kind = ConflictKind::Vertex;
  Cell u;

  friend bool operator==(const Conflict&, const Conflict&) = default;
};

enum class Cardinality { Cardinal = 0, SemiCardinal = 1, NonCardinal = 2 };

std::string to_string(const Conflict& c);
const char* to_string(Cardinality c);

// All pairwise k-delay conflicts. Each pair of occupancy runs at a cell is reported once.
std::vector<Conflict> detect_conflicts(const Plan& plan, int k, const GridMap& map);
// Same output, cells scanned by an OpenMP worksharing loop.
std::vector<Conflict> detect_conflicts_parallel(const Plan& plan, int k, const GridMap& map);

bool conflict_less(const Conflict& a, const Conflict& b);

// Singleton test on the optimal-path MDDs; beyond an MDD's depth the level is {goal}.
Cardinality classify_conflict(const Conflict& c, const Mdd& mdd_i, const Mdd& mdd_j);
Cardinality cardinality_of(bool side_i, bool side_j);

}  // namespace krcbs
