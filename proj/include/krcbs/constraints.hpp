#pragma once

#include <limits>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <variant>
#include <vector>

#include "krcbs/grid.hpp"
#include "krcbs/path.hpp"

namespace krcbs {

inline constexpr int kForever = std::numeric_limits<int>::max() / 4;

// agent may not occupy v at any t in [t_lo, t_hi]
struct RangeVertex {
  int agent = 0;
  Cell v;
  int t_lo = 0;
  int t_hi = 0;
  friend bool operator==(const RangeVertex&, const RangeVertex&) = default;
};

struct VertexFromOn {
  enum class Scope { Single, AllExcept };
  Scope scope = Scope::Single;
  int agent = 0;  // the constrained agent, or the exempt one for AllExcept
  Cell v;
  int t_lo = 0;
  friend bool operator==(const VertexFromOn&, const VertexFromOn&) = default;
};

struct MaxLength {
  int agent = 0;
  int T = 0;
  friend bool operator==(const MaxLength&, const MaxLength&) = default;
};

struct MinLength {
  int agent = 0;
  int T = 0;
  friend bool operator==(const MinLength&, const MinLength&) = default;
};

// agent may not move u -> v arriving at t (k = 0 only)
struct EdgeConstraint {
  int agent = 0;
  Cell u;
  Cell v;
  int t = 0;
  friend bool operator==(const EdgeConstraint&, const EdgeConstraint&) = default;
};

using Constraint = std::variant<RangeVertex, VertexFromOn, MaxLength, MinLength, EdgeConstraint>;
using ConstraintSet = std::vector<Constraint>;

bool applies_to(const Constraint& c, int agent);
bool violates(const Path& path, const Constraint& c);
bool violates_any(const Path& path, const ConstraintSet& cs);
std::string to_string(const Constraint& c);

// Canonical serialization of the constraints that apply to one agent; used as a cache key.
std::string constraint_key(const ConstraintSet& cs, int agent);

// Per-agent view of a constraint set, answering the questions the searches ask.
class ConstraintTable {
 public:
  ConstraintTable(const GridMap& map, const ConstraintSet& cs, int agent, Cell goal);

  bool vertex_blocked(int cell, int t) const;
  bool edge_blocked(int from, int to, int t) const;
  // May the agent arrive at its goal at t for the last time and stay there?
  bool can_finish(int t) const noexcept { return t >= earliest_finish_ && t <= max_length_; }
  bool permanently_blocked(int cell) const;

  int earliest_finish() const noexcept { return earliest_finish_; }
  int min_length() const noexcept { return min_length_; }
  int max_length() const noexcept { return max_length_; }
  // Every time-dependent constraint is over after this timestep.
  int latest_timestep() const noexcept { return latest_; }

 private:
  struct Interval {
    int lo;
    int hi;
  };
  int goal_;
  std::unordered_map<int, std::vector<Interval>> vertex_;
  std::set<std::tuple<int, int, int>> edges_;
  int min_length_ = 0;
  int max_length_ = kForever;
  int earliest_finish_ = 0;
  int latest_ = 0;
};

}  // namespace krcbs
