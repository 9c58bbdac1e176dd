#pragma once

#include <string_view>

#include "soilmine/rules.hpp"

namespace soilmine {

/// Text of data/default_rules.json; the test suite checks both stay identical.
inline constexpr std::string_view kDefaultRulesJson = R"json(
{
  "description": "Illustrative fertility rules (organic carbon, phosphorus, potassium, pH). Not any laboratory's published thresholds.",
  "rules": [
    {"attribute": "OC", "weight": 3.0,
     "bands": [{"below": 0.5, "rating": 2}, {"below": 0.75, "rating": 5},
               {"below": 1.0, "rating": 7}, {"below": null, "rating": 9}]},
    {"attribute": "P", "weight": 2.0,
     "bands": [{"below": 8, "rating": 2}, {"below": 12, "rating": 5},
               {"below": 16, "rating": 7}, {"below": null, "rating": 9}]},
    {"attribute": "K", "weight": 2.0,
     "bands": [{"below": 120, "rating": 2}, {"below": 250, "rating": 5},
               {"below": null, "rating": 8}]},
    {"attribute": "Ph", "weight": 1.0,
     "bands": [{"below": 5.5, "rating": 4}, {"below": 8.0, "rating": 8},
               {"below": null, "rating": 4}]}
  ],
  "cuts": [3.5, 4.5, 5.5, 6.5, 7.5]
}
)json";

/// Illustrative rule set shipped with the library; not a real laboratory's rules.
inline RuleSet default_ruleset() { return parse_rules(kDefaultRulesJson); }

}  // namespace soilmine
