#pragma once

#include <optional>
#include <string>
#include <vector>

#include "krcbs/constraints.hpp"
#include "krcbs/grid.hpp"
#include "krcbs/path.hpp"

// Ground truth for tests. Nothing here uses the conflicts, lowlevel or solver modules.
namespace krcbs::oracle {

struct Violation {
  int a_i = 0;
  int a_j = 0;
  Cell v;
  int t = 0;
  int delta = 0;
  bool swap = false;
};

struct Report {
  bool ok = true;
  std::optional<Violation> violation;
  std::string message;
};

// Checks path shape (start, goal, legal moves) and every pair for visits to one cell within k steps.
Report validate_k_robust(const Plan& plan, int k, const Instance& instance);

struct Delay {
  int t = 0;  // the agent waits `count` extra steps on cells[t]
  int count = 1;
};

Path apply_delays(const Path& path, const std::vector<Delay>& delays);

// Executes the delayed plan and looks for two agents on one cell at once, or swapping.
Report simulate_delays(const Plan& plan, int k, const std::vector<std::vector<Delay>>& delays,
                       const Instance& instance);

// Every delay vector with at most k delays per agent. Collisions are pairwise, so each pair of
// agents is enumerated over the product of their own delay vectors. Returns the first failure.
Report simulate_all_delays(const Plan& plan, int k, const Instance& instance, long long* vectors_checked = nullptr);

// All ways to place up to k single-step delays on a path of the given cost.
std::vector<std::vector<Delay>> delay_vectors(int cost, int k);

struct BruteForceResult {
  enum class Status { Optimal, OutOfBudget, NoneWithinBound };
  Status status = Status::OutOfBudget;
  int sic = -1;
  Plan plan;
  long long pairings = 0;
};

// Iterative deepening on SIC. Each agent's paths of one exact cost are enumerated by depth-first search
// and combined by backtracking with a pairwise k-robustness test.
BruteForceResult brute_force_optimal(const Instance& instance, int k, long long budget = 10'000'000,
                                     int max_extra = 64);

// Paths of exactly `cost` (final arrival at `cost`) for one agent. Stops after `limit` paths.
std::vector<Path> enumerate_paths(const GridMap& map, const AgentTask& task, int cost, long long limit = 1'000'000);

bool pair_k_robust(const Path& a, const Path& b, int k);

// Existence search over (cell, time, violated groups).
struct PathQuery {
  int max_cost = 0;
  int k = 0;
  ConstraintSet must_satisfy;                // the ones applying to the agent are honoured
  std::vector<ConstraintSet> must_violate;   // every group needs at least one violated member
  std::vector<Path> avoid;                   // must be k-robust with each of these
};

std::optional<Path> find_path(const GridMap& map, const AgentTask& task, const PathQuery& query);

// Every path with cost <= max_cost that satisfies `must_satisfy` and violates every group.
std::vector<Path> enumerate_constrained(const GridMap& map, const AgentTask& task, const PathQuery& query,
                                        long long limit = 2'000'000);

}  // namespace krcbs::oracle
