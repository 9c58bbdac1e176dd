#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "soilmine/attributes.hpp"
#include "soilmine/dataset.hpp"
#include "soilmine/error.hpp"

namespace soilmine {

/// Half-open rating band: a value v belongs to the first band with v < upper_bound.
struct Band {
  double upper_bound = std::numeric_limits<double>::infinity();
  int rating = 0;

  friend bool operator==(const Band&, const Band&) = default;
};

struct AttributeRule {
  Attribute attribute = Attribute::Ph;
  std::vector<Band> bands;  // strictly ascending, last bound +inf
  double weight = 1.0;

  int rating_for(double value) const {
    for (const Band& b : bands) {
      if (value < b.upper_bound) return b.rating;
    }
    return bands.back().rating;  // unreachable for finite values
  }

  friend bool operator==(const AttributeRule&, const AttributeRule&) = default;
};

inline constexpr std::size_t kNumCuts = kNumClasses - 1;

/// Declarative fertility rules: banded per-attribute ratings, aggregated as a
/// weighted mean and cut into six ordered classes.
struct RuleSet {
  std::vector<AttributeRule> rules;
  std::array<double, kNumCuts> cuts{};

  friend bool operator==(const RuleSet&, const RuleSet&) = default;
};

namespace detail {

inline std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

inline double json_number(const nlohmann::json& j, const std::string& what) {
  if (!j.is_number()) throw Error(ErrorCode::SyntaxError, what + " must be a number");
  return j.get<double>();
}

}  // namespace detail

/// Checks every RuleSet invariant; throws the matching error code.
inline void validate(const RuleSet& rs) {
  if (rs.rules.empty()) throw Error(ErrorCode::SyntaxError, "at least one rule is required");
  std::array<bool, kNumAttributes> seen{};
  double total_weight = 0.0;
  for (const AttributeRule& r : rs.rules) {
    const std::string name(name_of(r.attribute));
    if (seen[index_of(r.attribute)]) {
      throw Error(ErrorCode::DuplicateAttribute, "attribute has more than one rule", std::nullopt,
                  name);
    }
    seen[index_of(r.attribute)] = true;
    if (!std::isfinite(r.weight) || r.weight < 0.0) {
      throw Error(ErrorCode::InvalidConfig, "weight must be finite and >= 0", std::nullopt, name);
    }
    total_weight += r.weight;
    if (r.bands.empty()) {
      throw Error(ErrorCode::BandsNotAscending, "rule has no bands", std::nullopt, name);
    }
    for (std::size_t i = 0; i + 1 < r.bands.size(); ++i) {
      const double here = r.bands[i].upper_bound;
      const double next = r.bands[i + 1].upper_bound;
      if (!std::isfinite(here) || !(here < next)) {
        throw Error(ErrorCode::BandsNotAscending, "band bounds must increase strictly",
                    std::nullopt, name);
      }
    }
    if (r.bands.back().upper_bound != std::numeric_limits<double>::infinity()) {
      throw Error(ErrorCode::BandsNotAscending, "last band must be open-ended (below: null)",
                  std::nullopt, name);
    }
  }
  if (!(total_weight > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "weights must not all be zero", std::nullopt, "weight");
  }
  for (std::size_t i = 0; i < kNumCuts; ++i) {
    if (!std::isfinite(rs.cuts[i]) || (i > 0 && !(rs.cuts[i - 1] < rs.cuts[i]))) {
      throw Error(ErrorCode::BadCuts, "cuts must be finite and strictly ascending");
    }
  }
}

/// Parses a rule file:
///
///   { "rules": [ {"attribute": "OC", "weight": 1.0,
///                 "bands": [{"below": 0.4, "rating": 0}, {"below": null, "rating": 10}]} ],
///     "cuts": [c1, c2, c3, c4, c5] }
///
/// `"below": null` is +infinity. `weight` defaults to 1.
inline RuleSet parse_rules(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError, e.what(), detail::line_of_offset(text, e.byte));
  }
  if (!doc.is_object() || !doc.contains("rules") || !doc["rules"].is_array()) {
    throw Error(ErrorCode::SyntaxError, "document needs a \"rules\" array");
  }
  RuleSet rs;
  for (const auto& jr : doc["rules"]) {
    if (!jr.is_object() || !jr.contains("attribute") || !jr["attribute"].is_string()) {
      throw Error(ErrorCode::SyntaxError, "each rule needs an \"attribute\" string");
    }
    const auto name = jr["attribute"].get<std::string>();
    const auto attr = parse_attribute(name);
    if (!attr) throw Error(ErrorCode::UnknownAttribute, "no such attribute", std::nullopt, name);
    AttributeRule rule;
    rule.attribute = *attr;
    rule.weight = jr.contains("weight") ? detail::json_number(jr["weight"], "weight") : 1.0;
    if (!jr.contains("bands") || !jr["bands"].is_array()) {
      throw Error(ErrorCode::SyntaxError, "rule for " + name + " needs a \"bands\" array");
    }
    for (const auto& jb : jr["bands"]) {
      if (!jb.is_object() || !jb.contains("below") || !jb.contains("rating")) {
        throw Error(ErrorCode::SyntaxError, "band needs \"below\" and \"rating\"");
      }
      Band band;
      band.upper_bound = jb["below"].is_null() ? std::numeric_limits<double>::infinity()
                                               : detail::json_number(jb["below"], "below");
      const double rating = detail::json_number(jb["rating"], "rating");
      if (rating != std::floor(rating) || std::abs(rating) > 1e9) {
        throw Error(ErrorCode::SyntaxError, "rating must be an integer");
      }
      band.rating = static_cast<int>(rating);
      rule.bands.push_back(band);
    }
    rs.rules.push_back(std::move(rule));
  }
  if (!doc.contains("cuts") || !doc["cuts"].is_array() || doc["cuts"].size() != kNumCuts) {
    throw Error(ErrorCode::BadCuts, "exactly 5 cuts are required");
  }
  for (std::size_t i = 0; i < kNumCuts; ++i) {
    if (!doc["cuts"][i].is_number()) throw Error(ErrorCode::BadCuts, "cuts must be numbers");
    rs.cuts[i] = doc["cuts"][i].get<double>();
  }
  validate(rs);
  return rs;
}

inline std::string rules_to_json(const RuleSet& rs) {
  nlohmann::ordered_json doc;
  doc["rules"] = nlohmann::ordered_json::array();
  for (const auto& r : rs.rules) {
    nlohmann::ordered_json jr;
    jr["attribute"] = std::string(name_of(r.attribute));
    jr["weight"] = r.weight;
    jr["bands"] = nlohmann::ordered_json::array();
    for (const auto& b : r.bands) {
      nlohmann::ordered_json jb;
      if (std::isinf(b.upper_bound)) {
        jb["below"] = nullptr;
      } else {
        jb["below"] = b.upper_bound;
      }
      jb["rating"] = b.rating;
      jr["bands"].push_back(jb);
    }
    doc["rules"].push_back(jr);
  }
  doc["cuts"] = rs.cuts;
  return doc.dump(2) + "\n";
}

/// Weighted mean of the band ratings over all rules.
inline double fertility_index(const RuleSet& rs, const SoilSample& s) {
  double num = 0.0;
  double den = 0.0;
  for (const AttributeRule& r : rs.rules) {
    num += r.weight * r.rating_for(s[r.attribute]);
    den += r.weight;
  }
  return num / den;
}

/// Level = number of cuts at or below the index; an index equal to a cut goes up.
inline FertilityClass class_for_index(const RuleSet& rs, double index) {
  std::size_t level = 0;
  for (double c : rs.cuts) {
    if (index >= c) ++level;
  }
  return class_at(level);
}

inline FertilityClass classify_sample(const RuleSet& rs, const SoilSample& s) {
  return class_for_index(rs, fertility_index(rs, s));
}

/// Returns a copy of `d` whose labels are recomputed from `rs`; rows untouched.
inline Dataset label_dataset(const RuleSet& rs, const Dataset& d) {
  Dataset out = d;
  out.labels.emplace();
  out.labels->reserve(d.size());
  for (const auto& row : d.rows) out.labels->push_back(classify_sample(rs, row));
  return out;
}

inline RuleSet load_rules(const std::string& path) { return parse_rules(read_text_file(path)); }

}  // namespace soilmine
