#pragma once

#include <string>

#include "json.hpp"

#include "krcbs/grid.hpp"
#include "krcbs/solver.hpp"

namespace krcbs {

// {instance, k, sic, outcome, paths: [[[x,y], ...] per agent], stats: {...}}
nlohmann::json solution_to_json(const Instance& instance, int k, const Solution& solution, bool timing = true);
Plan plan_from_json(const nlohmann::json& j);

}  // namespace krcbs
