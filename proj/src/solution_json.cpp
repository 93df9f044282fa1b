#include "krcbs/solution_json.hpp"

namespace krcbs {

nlohmann::json solution_to_json(const Instance& instance, int k, const Solution& solution, bool timing) {
  nlohmann::json paths = nlohmann::json::array();
  for (const auto& p : solution.plan) {
    nlohmann::json cells = nlohmann::json::array();
    for (Cell c : p.cells) cells.push_back({c.x, c.y});
    paths.push_back(std::move(cells));
  }
  const auto& st = solution.stats;
  nlohmann::json stats{
      {"ct_expanded", st.ct_expanded},
      {"ct_generated", st.ct_generated},
      {"ct_pruned", st.ct_pruned},
      {"lowlevel_expansions", st.lowlevel_expansions},
      {"conflicts_by_type",
       {{"plain", st.resolved[0]}, {"rectangle", st.resolved[1]}, {"corridor", st.resolved[2]}, {"target", st.resolved[3]}}},
      {"rectangle_conflict_ratio", st.rectangle_conflict_ratio},
  };
  if (timing) stats["wall_time"] = st.wall_time;
  return nlohmann::json{{"instance", instance.name},
                        {"k", k},
                        {"outcome", to_string(solution.outcome)},
                        {"sic", solution.sic},
                        {"paths", std::move(paths)},
                        {"stats", std::move(stats)}};
}

Plan plan_from_json(const nlohmann::json& j) {
  Plan plan;
  for (const auto& p : j.at("paths")) {
    Path path;
    for (const auto& c : p) path.cells.push_back(Cell{c.at(0).get<int>(), c.at(1).get<int>()});
    plan.push_back(std::move(path));
  }
  return plan;
}

}  // namespace krcbs
