#pragma once

#include <json.hpp>

#include "permuton/fourier.hpp"
#include "permuton/models.hpp"
#include "permuton/permutation.hpp"
#include "permuton/roots.hpp"
#include "permuton/tree.hpp"

namespace permuton {

using nlohmann::json;

json to_json(const PatternDistribution& p);
PatternDistribution distribution_from_json(const json& j);

json to_json(const PermutationLaw& law);
PermutationLaw law_from_json(const json& j);

json to_json(const PiecewiseAffineMap& f);
PiecewiseAffineMap map_from_json(const json& j);

// {"type": "lebesgue" | "block" | "function" | "grid" | "tree", ...}
json to_json(const PermutonModel& mu);
PermutonModel model_from_json(const json& j);

json to_json(const FourierLimit& L);
json to_json(const FallingFactorialRoots& r);

}  // namespace permuton
