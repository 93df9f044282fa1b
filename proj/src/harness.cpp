#include "krcbs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>

#include "krcbs/solution_json.hpp"

namespace krcbs {

namespace {

std::string trim(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && issp(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && issp(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

int to_int(const std::string& s) {
  std::string t = trim(s);
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(t, &used);
  } catch (const std::exception&) {
    throw UsageError("not an integer: '" + s + "'");
  }
  if (used != t.size()) throw UsageError("not an integer: '" + s + "'");
  return v;
}

std::string basename_of(const std::string& path) { return std::filesystem::path(path).filename().string(); }

std::string format_double(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Labels of the 4-connected components; returns the label of the largest one.
int components(const GridMap& map, std::vector<int>& label) {
  label.assign(static_cast<std::size_t>(map.size()), -1);
  int next = 0;
  int best = -1;
  int best_size = 0;
  for (int idx = 0; idx < map.size(); ++idx) {
    if (!map.passable(idx) || label[static_cast<std::size_t>(idx)] >= 0) continue;
    int size = 0;
    std::queue<int> q;
    q.push(idx);
    label[static_cast<std::size_t>(idx)] = next;
    while (!q.empty()) {
      int c = q.front();
      q.pop();
      ++size;
      for (Cell n : map.neighbors(map.cell(c))) {
        int ni = map.index(n);
        if (label[static_cast<std::size_t>(ni)] < 0) {
          label[static_cast<std::size_t>(ni)] = next;
          q.push(ni);
        }
      }
    }
    if (size > best_size) {
      best_size = size;
      best = next;
    }
    ++next;
  }
  return best;
}

// Distinct random starts and goals inside the largest component.
std::vector<AgentTask> random_tasks(const GridMap& map, int count, std::mt19937_64& rng) {
  std::vector<int> label;
  int big = components(map, label);
  std::vector<int> cells;
  for (int idx = 0; idx < map.size(); ++idx)
    if (label[static_cast<std::size_t>(idx)] == big) cells.push_back(idx);
  if (static_cast<int>(cells.size()) < count + 1) throw std::invalid_argument("map too small for the agent count");
  auto shuffled = [&]() {
    std::vector<int> v = cells;
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(rng() % i)]);
    return v;
  };
  std::vector<int> starts = shuffled();
  std::vector<int> goals = shuffled();
  std::vector<AgentTask> tasks;
  std::vector<char> goal_used(static_cast<std::size_t>(map.size()), 0);
  std::size_t gi = 0;
  for (int a = 0; a < count; ++a) {
    int s = starts[static_cast<std::size_t>(a)];
    while (gi < goals.size() && (goals[gi] == s || goal_used[static_cast<std::size_t>(goals[gi])])) ++gi;
    if (gi == goals.size()) throw std::invalid_argument("could not place goals");
    goal_used[static_cast<std::size_t>(goals[gi])] = 1;
    tasks.push_back(AgentTask{a, map.cell(s), map.cell(goals[gi])});
    ++gi;
  }
  return tasks;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& part : split(text, ','))
    if (!trim(part).empty()) out.push_back(to_int(part));
  if (out.empty()) throw UsageError("empty list '" + text + "'");
  return out;
}

std::vector<std::string> parse_name_list(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& part : split(text, ','))
    if (!trim(part).empty()) out.push_back(trim(part));
  if (out.empty()) throw UsageError("empty list '" + text + "'");
  return out;
}

std::vector<int> parse_agent_counts(const std::string& text) {
  std::vector<int> out;
  auto dots = text.find("..");
  if (dots == std::string::npos) {
    out = parse_int_list(text);
  } else {
    int a = to_int(text.substr(0, dots));
    std::string rest = text.substr(dots + 2);
    int step = 1;
    auto colon = rest.find(':');
    if (colon != std::string::npos) {
      step = to_int(rest.substr(colon + 1));
      rest = rest.substr(0, colon);
    }
    int b = to_int(rest);
    if (step <= 0 || b < a) throw UsageError("bad agent range '" + text + "'");
    for (int n = a; n <= b; n += step) out.push_back(n);
  }
  for (int n : out)
    if (n <= 0) throw UsageError("agent counts must be positive");
  return out;
}

ArchetypeSpec parse_archetype(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("archetype must look like kind:param");
  std::string kind = text.substr(0, colon);
  std::string param = text.substr(colon + 1);
  ArchetypeSpec spec;
  auto plus = param.find('+');
  if (plus != std::string::npos) {
    if (param.substr(plus + 1) != "siding") throw UsageError("unknown archetype option '" + param + "'");
    spec.siding = true;
    param = param.substr(0, plus);
  }
  spec.param = to_int(param);
  if (kind == "rectangle") spec.kind = ArchetypeKind::Rectangle;
  else if (kind == "corridor") spec.kind = ArchetypeKind::Corridor;
  else if (kind == "target") spec.kind = ArchetypeKind::Target;
  else throw UsageError("unknown archetype '" + kind + "'");
  if (spec.siding && spec.kind != ArchetypeKind::Corridor) throw UsageError("siding only applies to corridors");
  if (spec.param < 1) throw UsageError("archetype parameter must be positive");
  return spec;
}

std::string to_string(const ArchetypeSpec& spec) {
  std::string kind = spec.kind == ArchetypeKind::Rectangle ? "rectangle"
                     : spec.kind == ArchetypeKind::Corridor ? "corridor"
                                                            : "target";
  return kind + ":" + std::to_string(spec.param) + (spec.siding ? "+siding" : "");
}

Instance generate_archetype(const ArchetypeSpec& spec, int k) {
  const int p = spec.param;
  switch (spec.kind) {
    case ArchetypeKind::Rectangle: {
      GridMap map = GridMap::open(p + 2, p + 2);
      std::vector<AgentTask> tasks{{0, {1, 0}, {p, p + 1}}, {1, {0, 1}, {p + 1, p}}};
      return make_instance(std::move(map), std::move(tasks), k, to_string(spec));
    }
    case ArchetypeKind::Corridor: {
      GridMap map = GridMap::open(p + 4, 3);
      for (int x = 2; x <= p + 1; ++x) {
        map.set_passable({x, 0}, false);
        map.set_passable({x, 2}, false);
      }
      if (spec.siding) map.set_passable({2 + p / 2, 0}, true);
      std::vector<AgentTask> tasks{{0, {0, 0}, {p + 3, 2}}, {1, {p + 3, 0}, {0, 2}}};
      return make_instance(std::move(map), std::move(tasks), k, to_string(spec));
    }
    case ArchetypeKind::Target: {
      GridMap map = GridMap::open(p + 3, 2);
      std::vector<AgentTask> tasks{{0, {0, 1}, {p + 2, 1}}, {1, {p, 0}, {p, 1}}};
      return make_instance(std::move(map), std::move(tasks), k, to_string(spec));
    }
  }
  throw std::logic_error("unreachable");
}

GridMap random_map(int width, int height, double obstacle_ratio, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GridMap map = GridMap::open(width, height);
  std::vector<int> cells(static_cast<std::size_t>(map.size()));
  std::iota(cells.begin(), cells.end(), 0);
  const int blocked = static_cast<int>(std::lround(obstacle_ratio * map.size()));
  for (int i = 0; i < blocked; ++i) {
    std::size_t j = static_cast<std::size_t>(i) + static_cast<std::size_t>(rng() % (cells.size() - static_cast<std::size_t>(i)));
    std::swap(cells[static_cast<std::size_t>(i)], cells[j]);
    map.set_passable(map.cell(cells[static_cast<std::size_t>(i)]), false);
  }
  return map;
}

std::string random_scen(const GridMap& map, const std::string& map_name, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto tasks = random_tasks(map, count, rng);
  std::string out = "version 1\n";
  for (const auto& t : tasks) {
    out += "0\t" + map_name + "\t" + std::to_string(map.width()) + "\t" + std::to_string(map.height()) + "\t" +
           std::to_string(t.start.x) + "\t" + std::to_string(t.start.y) + "\t" + std::to_string(t.goal.x) + "\t" +
           std::to_string(t.goal.y) + "\t" + std::to_string(manhattan(t.start, t.goal)) + "\n";
  }
  return out;
}

Instance random_instance(int width, int height, double obstacle_ratio, int agents, int k, std::uint64_t seed) {
  GridMap map = random_map(width, height, obstacle_ratio, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  auto tasks = random_tasks(map, agents, rng);
  return make_instance(std::move(map), std::move(tasks), k, "random-" + std::to_string(seed));
}

std::string csv_header() {
  return "map,scen,n,k,variant,outcome,sic,ct_expanded,ct_generated,rectangle_conflict_ratio,wall_time_ms";
}

std::string to_csv(const RunRow& r, bool timing) {
  return r.map + "," + r.scen + "," + std::to_string(r.n) + "," + std::to_string(r.k) + "," + r.variant + "," +
         r.outcome + "," + std::to_string(r.sic) + "," + std::to_string(r.ct_expanded) + "," +
         std::to_string(r.ct_generated) + "," + format_double(r.rectangle_conflict_ratio, 6) + "," +
         (timing ? format_double(r.wall_time_ms, 3) : std::string("-"));
}

std::optional<RunRow> parse_csv_row(const std::string& line) {
  auto f = split(trim(line), ',');
  if (f.size() != 11 || f[0] == "map") return std::nullopt;
  try {
    RunRow r;
    r.map = f[0];
    r.scen = f[1];
    r.n = std::stoi(f[2]);
    r.k = std::stoi(f[3]);
    r.variant = f[4];
    r.outcome = f[5];
    r.sic = std::stoi(f[6]);
    r.ct_expanded = std::stoll(f[7]);
    r.ct_generated = std::stoll(f[8]);
    r.rectangle_conflict_ratio = std::stod(f[9]);
    r.wall_time_ms = f[10] == "-" ? 0.0 : std::stod(f[10]);
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::map<SuccessKey, SuccessCount> success_rates(const std::vector<RunRow>& rows) {
  std::map<SuccessKey, SuccessCount> out;
  for (const auto& r : rows) {
    auto& c = out[SuccessKey{r.n, r.k, r.variant}];
    ++c.total;
    if (r.outcome == "solved") ++c.solved;
  }
  return out;
}

namespace {

RunRow run_one(const Instance& inst, const std::string& map_name, const std::string& scen_name, int k,
               const std::string& variant, const BenchmarkOptions& options, std::ostream& out) {
  SolverConfig cfg = variant_config(variant);
  cfg.k = k;
  cfg.time_limit = options.time_limit;
  cfg.seed = options.seed;
  Solution sol = solve(inst, cfg);
  RunRow row;
  row.map = map_name;
  row.scen = scen_name;
  row.n = inst.num_agents();
  row.k = k;
  row.variant = variant;
  row.outcome = to_string(sol.outcome);
  row.sic = sol.sic;
  row.ct_expanded = sol.stats.ct_expanded;
  row.ct_generated = sol.stats.ct_generated;
  row.rectangle_conflict_ratio = sol.stats.rectangle_conflict_ratio;
  row.wall_time_ms = sol.stats.wall_time * 1000.0;
  if (options.format == OutputFormat::Csv) {
    out << to_csv(row, options.timing) << '\n';
  } else {
    auto j = solution_to_json(inst, k, sol, options.timing);
    j["map"] = map_name;
    j["scen"] = scen_name;
    j["variant"] = variant;
    out << j.dump() << '\n';
  }
  out.flush();
  return row;
}

void header(const BenchmarkOptions& options, std::ostream& out) {
  if (options.format == OutputFormat::Csv) out << csv_header() << '\n' << std::flush;
}

void check_variants(const BenchmarkOptions& options) {
  if (options.variants.empty()) throw UsageError("no variants given");
  for (const auto& v : options.variants) {
    try {
      (void)variant_config(v);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  for (int k : options.ks)
    if (k < 0) throw UsageError("k must be non-negative");
  if (!(options.time_limit > 0)) throw UsageError("time limit must be positive");
}

}  // namespace

std::vector<RunRow> run_benchmark(const std::string& map_path, const std::vector<std::string>& scen_paths,
                                  const std::vector<int>& agent_counts, const BenchmarkOptions& options,
                                  std::ostream& out) {
  check_variants(options);
  if (scen_paths.empty()) throw UsageError("no scenario files given");
  if (agent_counts.empty()) throw UsageError("no agent counts given");
  for (int n : agent_counts)
    if (n <= 0) throw UsageError("zero agents requested");
  GridMap map = [&] {
    try {
      return parse_map(read_text_file(map_path));
    } catch (const std::runtime_error& e) {
      throw UsageError(map_path + ": " + e.what());
    }
  }();
  std::vector<std::vector<AgentTask>> scens;
  for (const auto& sp : scen_paths) {
    try {
      scens.push_back(parse_scen(read_text_file(sp), map));
    } catch (const std::runtime_error& e) {
      throw UsageError(sp + ": " + e.what());
    }
  }
  header(options, out);
  std::vector<RunRow> rows;
  const std::string map_name = basename_of(map_path);
  for (int n : agent_counts) {
    for (std::size_t s = 0; s < scens.size(); ++s) {
      if (static_cast<int>(scens[s].size()) < n)
        throw UsageError(scen_paths[s] + " has only " + std::to_string(scens[s].size()) + " tasks");
      std::vector<AgentTask> tasks(scens[s].begin(), scens[s].begin() + n);
      for (int k : options.ks) {
        Instance inst = make_instance(map, tasks, k, map_name);
        for (const auto& v : options.variants) rows.push_back(run_one(inst, map_name, basename_of(scen_paths[s]), k, v, options, out));
      }
    }
  }
  return rows;
}

std::vector<RunRow> run_archetype(const ArchetypeSpec& spec, const BenchmarkOptions& options, std::ostream& out) {
  check_variants(options);
  header(options, out);
  std::vector<RunRow> rows;
  for (int k : options.ks) {
    Instance inst = generate_archetype(spec, k);
    for (const auto& v : options.variants) rows.push_back(run_one(inst, "archetype", to_string(spec), k, v, options, out));
  }
  return rows;
}

std::vector<Instance> random_suite_instances(const RandomSuite& suite, std::uint64_t seed) {
  std::vector<Instance> out;
  const int span = suite.max_agents - suite.min_agents + 1;
  for (int i = 0; i < suite.count; ++i) {
    int agents = suite.min_agents + i % span;
    out.push_back(random_instance(suite.width, suite.height, suite.obstacle_ratio, agents, 0,
                                  seed + static_cast<std::uint64_t>(i)));
  }
  return out;
}

std::vector<RunRow> run_random_suite(const RandomSuite& suite, const BenchmarkOptions& options, std::ostream& out) {
  check_variants(options);
  if (suite.count <= 0 || suite.min_agents <= 0 || suite.max_agents < suite.min_agents)
    throw UsageError("bad random suite description");
  header(options, out);
  std::vector<RunRow> rows;
  for (auto& base : random_suite_instances(suite, options.seed)) {
    for (int k : options.ks) {
      Instance inst = base;
      inst.k = k;
      for (const auto& v : options.variants) rows.push_back(run_one(inst, "random", inst.name, k, v, options, out));
    }
  }
  return rows;
}

}  // namespace krcbs
