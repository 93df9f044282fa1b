#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "krcbs/grid.hpp"
#include "krcbs/solver.hpp"

namespace krcbs {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "a..b[:step]" or a single count; also accepts comma lists "10,15,20".
std::vector<int> parse_agent_counts(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);
std::vector<std::string> parse_name_list(const std::string& text);

enum class ArchetypeKind { Rectangle, Corridor, Target };

struct ArchetypeSpec {
  ArchetypeKind kind = ArchetypeKind::Rectangle;
  int param = 2;
  bool siding = false;  // corridor only: one extra cell off the middle of the passage
};

// "rectangle:3", "corridor:4", "corridor:4+siding", "target:2"
ArchetypeSpec parse_archetype(const std::string& text);
std::string to_string(const ArchetypeSpec& spec);

// rectangle(s): open (s+2)x(s+2) grid, one agent crossing top to bottom and one left to right.
// corridor(l): rooms of width 2 joined by a width-1 passage of l cells; agents swap sides.
// target(d): a 2-row strip; one agent parks d cells along the other's shortest route.
Instance generate_archetype(const ArchetypeSpec& spec, int k);

// Random open grid with the given obstacle ratio; every agent's goal is reachable from its start.
Instance random_instance(int width, int height, double obstacle_ratio, int agents, int k, std::uint64_t seed);
GridMap random_map(int width, int height, double obstacle_ratio, std::uint64_t seed);
// Scenario text with `count` tasks placed in the largest connected region of `map`.
std::string random_scen(const GridMap& map, const std::string& map_name, int count, std::uint64_t seed);

struct RunRow {
  std::string map;
  std::string scen;
  int n = 0;
  int k = 0;
  std::string variant;
  std::string outcome;
  int sic = -1;
  long long ct_expanded = 0;
  long long ct_generated = 0;
  double rectangle_conflict_ratio = 0.0;
  double wall_time_ms = 0.0;
};

std::string csv_header();
// With timing suppressed the wall time column is written as "-" so reruns compare byte for byte.
std::string to_csv(const RunRow& row, bool timing);
std::optional<RunRow> parse_csv_row(const std::string& line);

struct SuccessKey {
  int n;
  int k;
  std::string variant;
  friend bool operator<(const SuccessKey& a, const SuccessKey& b) {
    return std::tie(a.n, a.k, a.variant) < std::tie(b.n, b.k, b.variant);
  }
};
struct SuccessCount {
  int solved = 0;
  int total = 0;
  double rate() const { return total == 0 ? 0.0 : static_cast<double>(solved) / total; }
};
std::map<SuccessKey, SuccessCount> success_rates(const std::vector<RunRow>& rows);

enum class OutputFormat { Csv, Json };

struct BenchmarkOptions {
  std::vector<int> ks{1};
  std::vector<std::string> variants{"KCBS", "KCBSH", "KCBSH-RM", "KCBSH-RM-C", "KCBSH-RM-C-T"};
  double time_limit = 10.0;
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::Csv;
  bool timing = true;
};

// One row per (scenario, agent count, k, variant), written and flushed as each run finishes.
std::vector<RunRow> run_benchmark(const std::string& map_path, const std::vector<std::string>& scen_paths,
                                  const std::vector<int>& agent_counts, const BenchmarkOptions& options,
                                  std::ostream& out);

std::vector<RunRow> run_archetype(const ArchetypeSpec& spec, const BenchmarkOptions& options, std::ostream& out);

struct RandomSuite {
  int width = 6;
  int height = 6;
  double obstacle_ratio = 0.1;
  int min_agents = 2;
  int max_agents = 3;
  int count = 200;
};

// Seeded random instances; instance i uses seed + i and agent count min + i % (max - min + 1).
std::vector<Instance> random_suite_instances(const RandomSuite& suite, std::uint64_t seed);
std::vector<RunRow> run_random_suite(const RandomSuite& suite, const BenchmarkOptions& options, std::ostream& out);

}  // namespace krcbs
