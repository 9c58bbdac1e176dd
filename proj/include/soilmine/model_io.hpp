#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "soilmine/attributes.hpp"
#include "soilmine/error.hpp"
#include "soilmine/models.hpp"

// Versioned JSON form of every trained model:
//
//   {"format": "soilmine-model", "version": 1, "type": <type>, ...payload}
//
// type "naive_bayes":  priors[6], class_counts[6], likelihoods[6][9] of {mean, variance}
// type "c45":          nodes[] of {leaf, attribute, threshold, left, right,
//                      counts[6], majority, count, error_estimate}
// type "ripper":       rules[] of {conditions[] of {attribute, op "<="|">=", value},
//                      predicted, coverage[6]}, default_class, default_coverage[6]
// type "majority":     counts[6]
// type "linear":       target, retained[], coefficients[], intercept,
//                      meta {algorithm, build_time_s, objective}
//
// Attributes and classes are written by name. Doubles are written in their
// shortest round-trip form, so a reloaded model predicts bit-identically.

namespace soilmine {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson header(const char* type) {
  ojson j;
  j["format"] = "soilmine-model";
  j["version"] = kModelFormatVersion;
  j["type"] = type;
  return j;
}

inline Attribute attribute_from_json(const nlohmann::json& j) {
  const auto a = parse_attribute(j.get<std::string>());
  if (!a) throw Error(ErrorCode::BadModel, "unknown attribute '" + j.get<std::string>() + "'");
  return *a;
}

inline FertilityClass class_from_json(const nlohmann::json& j) {
  const auto c = parse_class(j.get<std::string>());
  if (!c) throw Error(ErrorCode::BadModel, "unknown class '" + j.get<std::string>() + "'");
  return *c;
}

inline ClassCounts counts_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != kNumClasses) throw Error(ErrorCode::BadModel, "expected 6 class counts");
  ClassCounts c{};
  for (std::size_t k = 0; k < kNumClasses; ++k) c[k] = j[k].get<double>();
  return c;
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const NaiveBayesModel& m) {
  auto j = detail::header("naive_bayes");
  j["priors"] = m.priors;
  j["class_counts"] = m.class_counts;
  auto& lik = j["likelihoods"] = detail::ojson::array();
  for (const auto& per_class : m.likelihoods) {
    auto row = detail::ojson::array();
    for (const auto& g : per_class) row.push_back({{"mean", g.mean}, {"variance", g.variance}});
    lik.push_back(row);
  }
  return j;
}

inline nlohmann::ordered_json to_json(const DecisionTree& t) {
  auto j = detail::header("c45");
  auto& nodes = j["nodes"] = detail::ojson::array();
  for (const auto& n : t.nodes) {
    detail::ojson jn;
    jn["leaf"] = n.leaf;
    jn["attribute"] = std::string(name_of(n.attribute));
    jn["threshold"] = n.threshold;
    jn["left"] = n.left;
    jn["right"] = n.right;
    jn["counts"] = n.counts;
    jn["majority"] = std::string(name_of(n.majority));
    jn["count"] = n.count;
    jn["error_estimate"] = n.error_estimate;
    nodes.push_back(jn);
  }
  return j;
}

inline nlohmann::ordered_json to_json(const RuleList& r) {
  auto j = detail::header("ripper");
  auto& rules = j["rules"] = detail::ojson::array();
  for (const auto& rule : r.rules) {
    detail::ojson jr;
    auto& conds = jr["conditions"] = detail::ojson::array();
    for (const auto& c : rule.conditions) {
      conds.push_back({{"attribute", std::string(name_of(c.attribute))},
                       {"op", c.less_equal ? "<=" : ">="},
                       {"value", c.value}});
    }
    jr["predicted"] = std::string(name_of(rule.predicted));
    jr["coverage"] = rule.coverage;
    rules.push_back(jr);
  }
  j["default_class"] = std::string(name_of(r.default_class));
  j["default_coverage"] = r.default_coverage;
  return j;
}

inline nlohmann::ordered_json to_json(const MajorityModel& m) {
  auto j = detail::header("majority");
  j["counts"] = m.counts;
  return j;
}

inline nlohmann::ordered_json to_json(const LinearModel& m) {
  auto j = detail::header("linear");
  j["target"] = std::string(name_of(m.target));
  auto& retained = j["retained"] = detail::ojson::array();
  for (Attribute a : m.retained) retained.push_back(std::string(name_of(a)));
  j["coefficients"] = m.coefficients;
  j["intercept"] = m.intercept;
  j["meta"] = {{"algorithm", m.meta.algorithm},
               {"build_time_s", m.meta.build_time_s},
               {"objective", m.meta.objective}};
  return j;
}

inline nlohmann::ordered_json to_json(const ClassifierModel& m) {
  return std::visit([](const auto& x) { return to_json(x); }, m);
}

namespace detail {

inline void check_header(const nlohmann::json& j, const char* type) {
  if (!j.is_object() || j.value("format", "") != "soilmine-model") {
    throw Error(ErrorCode::BadModel, "not a soilmine model document");
  }
  if (j.value("version", 0) != kModelFormatVersion) {
    throw Error(ErrorCode::BadModel, "unsupported model version");
  }
  if (type && j.value("type", "") != type) {
    throw Error(ErrorCode::BadModel, std::string("expected model type ") + type);
  }
}

}  // namespace detail

/// Reads any classifier document.
inline ClassifierModel classifier_from_json(const nlohmann::json& j) {
  detail::check_header(j, nullptr);
  try {
    const auto type = j.at("type").get<std::string>();
    if (type == "naive_bayes") {
      NaiveBayesModel m;
      for (std::size_t c = 0; c < kNumClasses; ++c) {
        m.priors[c] = j.at("priors").at(c).get<double>();
        m.class_counts[c] = j.at("class_counts").at(c).get<std::size_t>();
        for (std::size_t a = 0; a < kNumAttributes; ++a) {
          const auto& g = j.at("likelihoods").at(c).at(a);
          m.likelihoods[c][a] = Gaussian{g.at("mean").get<double>(), g.at("variance").get<double>()};
        }
      }
      return m;
    }
    if (type == "c45") {
      DecisionTree t;
      for (const auto& jn : j.at("nodes")) {
        TreeNode n;
        n.leaf = jn.at("leaf").get<bool>();
        n.attribute = detail::attribute_from_json(jn.at("attribute"));
        n.threshold = jn.at("threshold").get<double>();
        n.left = jn.at("left").get<std::size_t>();
        n.right = jn.at("right").get<std::size_t>();
        n.counts = detail::counts_from_json(jn.at("counts"));
        n.majority = detail::class_from_json(jn.at("majority"));
        n.count = jn.at("count").get<double>();
        n.error_estimate = jn.at("error_estimate").get<double>();
        t.nodes.push_back(n);
      }
      if (t.nodes.empty()) throw Error(ErrorCode::BadModel, "tree has no nodes");
      for (const auto& n : t.nodes) {
        if (!n.leaf && (n.left >= t.nodes.size() || n.right >= t.nodes.size())) {
          throw Error(ErrorCode::BadModel, "child index out of range");
        }
      }
      return t;
    }
    if (type == "ripper") {
      RuleList r;
      for (const auto& jr : j.at("rules")) {
        Rule rule;
        for (const auto& jc : jr.at("conditions")) {
          Condition c;
          c.attribute = detail::attribute_from_json(jc.at("attribute"));
          const auto op = jc.at("op").get<std::string>();
          if (op != "<=" && op != ">=") throw Error(ErrorCode::BadModel, "bad condition operator");
          c.less_equal = op == "<=";
          c.value = jc.at("value").get<double>();
          rule.conditions.push_back(c);
        }
        rule.predicted = detail::class_from_json(jr.at("predicted"));
        rule.coverage = detail::counts_from_json(jr.at("coverage"));
        r.rules.push_back(std::move(rule));
      }
      r.default_class = detail::class_from_json(j.at("default_class"));
      r.default_coverage = detail::counts_from_json(j.at("default_coverage"));
      return r;
    }
    if (type == "majority") return MajorityModel{detail::counts_from_json(j.at("counts"))};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadModel, e.what());
  }
  throw Error(ErrorCode::BadModel, "not a classifier model");
}

inline LinearModel linear_model_from_json(const nlohmann::json& j) {
  detail::check_header(j, "linear");
  try {
    LinearModel m;
    m.target = detail::attribute_from_json(j.at("target"));
    for (const auto& a : j.at("retained")) m.retained.push_back(detail::attribute_from_json(a));
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    if (m.coefficients.size() != m.retained.size()) {
      throw Error(ErrorCode::BadModel, "coefficient count differs from retained attributes");
    }
    m.intercept = j.at("intercept").get<double>();
    const auto& meta = j.at("meta");
    m.meta.algorithm = meta.at("algorithm").get<std::string>();
    m.meta.build_time_s = meta.at("build_time_s").get<double>();
    m.meta.objective = meta.at("objective").get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadModel, e.what());
  }
}

}  // namespace soilmine
