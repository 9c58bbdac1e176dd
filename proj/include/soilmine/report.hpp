#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "soilmine/attributes.hpp"
#include "soilmine/cross_validation.hpp"
#include "soilmine/dataset.hpp"
#include "soilmine/error.hpp"
#include "soilmine/format.hpp"

namespace soilmine {

enum class OutputFormat { Text, Csv, Json };

inline std::optional<OutputFormat> parse_output_format(std::string_view s) {
  if (s == "text") return OutputFormat::Text;
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  return std::nullopt;
}

/// Build times are wall-clock and differ between runs, so they are left out
/// of rendered reports unless asked for; everything else is reproducible.
struct RenderOptions {
  bool include_timing = false;
};

inline constexpr int kReportSchemaVersion = 1;

/// Metric rows by algorithm columns, values already formatted.
struct MetricTable {
  std::vector<std::string> algorithms;
  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
};

inline std::string format_percent(double fraction) { return format_fixed(100.0 * fraction, 2) + "%"; }

inline MetricTable classification_table(std::span<const EvaluationReport> reports, const RenderOptions& opts = {}) {
  MetricTable t;
  for (const auto& r : reports) t.algorithms.push_back(r.algorithm);
  auto row = [&](std::string label, auto&& cell) {
    std::vector<std::string> cells;
    for (const auto& r : reports) cells.push_back(cell(r));
    t.rows.emplace_back(std::move(label), std::move(cells));
  };
  row("Correctly Classified Instances", [](const EvaluationReport& r) { return std::to_string(r.correct); });
  row("Incorrectly Classified Instances", [](const EvaluationReport& r) { return std::to_string(r.incorrect); });
  row("Accuracy", [](const EvaluationReport& r) { return format_percent(r.accuracy); });
  row("Mean Absolute Error", [](const EvaluationReport& r) { return format_fixed(r.mae, 4); });
  row("Error Rate", [](const EvaluationReport& r) { return format_percent(r.error_rate); });
  row("Weighted TP Rate", [](const EvaluationReport& r) { return format_fixed(r.weighted_tpr, 4); });
  row("Weighted FP Rate", [](const EvaluationReport& r) { return format_fixed(r.weighted_fpr, 4); });
  if (opts.include_timing) {
    row("Time taken to build model (s)", [](const EvaluationReport& r) { return format_fixed(r.build_time_s, 2); });
  }
  return t;
}

inline MetricTable regression_table(std::span<const RegressionReport> reports, const RenderOptions& opts = {}) {
  MetricTable t;
  for (const auto& r : reports) t.algorithms.push_back(r.algorithm);
  auto row = [&](std::string label, auto&& cell) {
    std::vector<std::string> cells;
    for (const auto& r : reports) cells.push_back(cell(r));
    t.rows.emplace_back(std::move(label), std::move(cells));
  };
  if (opts.include_timing) {
    row("Time taken to build the model (s)", [](const RegressionReport& r) { return format_fixed(r.build_time_s, 2); });
  }
  row("Relative Absolute Error", [](const RegressionReport& r) { return format_fixed(r.rae_percent, 2) + "%"; });
  row("Correlation Coefficient", [](const RegressionReport& r) { return format_fixed(r.correlation, 4); });
  return t;
}

inline std::string render_text(const MetricTable& t) {
  std::size_t label_width = std::string_view("Metric").size();
  for (const auto& [label, _] : t.rows) label_width = std::max(label_width, label.size());
  std::vector<std::size_t> widths;
  for (std::size_t c = 0; c < t.algorithms.size(); ++c) {
    std::size_t w = t.algorithms[c].size();
    for (const auto& [_, cells] : t.rows) w = std::max(w, cells[c].size());
    widths.push_back(w);
  }
  std::ostringstream out;
  auto pad_right = [&](const std::string& s, std::size_t w) { out << s << std::string(w - s.size(), ' '); };
  auto pad_left = [&](const std::string& s, std::size_t w) { out << std::string(w - s.size(), ' ') << s; };
  pad_right("Metric", label_width);
  for (std::size_t c = 0; c < t.algorithms.size(); ++c) {
    out << "  ";
    pad_left(t.algorithms[c], widths[c]);
  }
  out << '\n';
  for (const auto& [label, cells] : t.rows) {
    pad_right(label, label_width);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      out << "  ";
      pad_left(cells[c], widths[c]);
    }
    out << '\n';
  }
  return out.str();
}

inline std::string render_csv(const MetricTable& t) {
  std::ostringstream out;
  out << "Metric";
  for (const auto& a : t.algorithms) out << ',' << a;
  out << '\n';
  for (const auto& [label, cells] : t.rows) {
    out << label;
    for (const auto& c : cells) out << ',' << c;
    out << '\n';
  }
  return out.str();
}

inline std::string render_confusion(const EvaluationReport& r) {
  std::ostringstream out;
  out << "Confusion matrix (" << r.algorithm << "), rows = actual, columns = predicted\n";
  std::size_t w = 6;
  for (const auto& row : r.confusion.counts) {
    for (std::size_t v : row) w = std::max(w, std::to_string(v).size());
  }
  std::size_t label_w = 0;
  for (auto n : kClassNames) label_w = std::max(label_w, n.size());
  out << std::string(label_w, ' ');
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const std::string head = "c" + std::to_string(c);
    out << "  " << std::string(w - head.size(), ' ') << head;
  }
  out << "     TPR     FPR\n";
  for (std::size_t a = 0; a < kNumClasses; ++a) {
    const std::string name(kClassNames[a]);
    out << name << std::string(label_w - name.size(), ' ');
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      const std::string v = std::to_string(r.confusion.counts[a][p]);
      out << "  " << std::string(w - v.size(), ' ') << v;
    }
    const Rates& rates = r.per_class[a];
    out << "  " << format_fixed(rates.tpr, 4) << (rates.tpr_undefined ? "*" : " ");
    out << " " << format_fixed(rates.fpr, 4) << (rates.fpr_undefined ? "*" : " ") << '\n';
  }
  out << "(c0..c5 = Very Low..Very High; * = zero denominator, reported as 0)\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// JSON:  {"schema": "soilmine-report", "version": 1, "kind": "classification"|"regression",
//         "reports": [{algorithm, k, seed, metrics{...}, confusion[[...]], build_time_s}]}
// build_time_s is null when timing is excluded.

inline nlohmann::ordered_json to_json(const EvaluationReport& r, const RenderOptions& opts = {}) {
  nlohmann::ordered_json j;
  j["algorithm"] = r.algorithm;
  j["k"] = r.k;
  j["seed"] = r.seed;
  auto& m = j["metrics"];
  m["correct"] = r.correct;
  m["incorrect"] = r.incorrect;
  m["total"] = r.total();
  m["accuracy"] = r.accuracy;
  m["error_rate"] = r.error_rate;
  m["mae"] = r.mae;
  m["weighted_tpr"] = r.weighted_tpr;
  m["weighted_fpr"] = r.weighted_fpr;
  auto& per = m["per_class"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const Rates& rt = r.per_class[c];
    per.push_back({{"class", std::string(kClassNames[c])},
                   {"tpr", rt.tpr},
                   {"fpr", rt.fpr},
                   {"tpr_undefined", rt.tpr_undefined},
                   {"fpr_undefined", rt.fpr_undefined}});
  }
  j["confusion"] = r.confusion.counts;
  if (opts.include_timing) {
    j["build_time_s"] = r.build_time_s;
  } else {
    j["build_time_s"] = nullptr;
  }
  return j;
}

inline nlohmann::ordered_json to_json(const RegressionReport& r, const RenderOptions& opts = {}) {
  nlohmann::ordered_json j;
  j["algorithm"] = r.algorithm;
  j["target"] = std::string(name_of(r.target));
  j["k"] = r.k;
  j["seed"] = r.seed;
  j["metrics"] = {{"correlation", r.correlation},
                  {"correlation_undefined", r.correlation_undefined},
                  {"rae_percent", r.rae_percent}};
  if (opts.include_timing) {
    j["build_time_s"] = r.build_time_s;
  } else {
    j["build_time_s"] = nullptr;
  }
  return j;
}

template <typename Report>
nlohmann::ordered_json reports_to_json(std::span<const Report> reports, const RenderOptions& opts) {
  nlohmann::ordered_json doc;
  doc["schema"] = "soilmine-report";
  doc["version"] = kReportSchemaVersion;
  doc["kind"] = std::is_same_v<Report, EvaluationReport> ? "classification" : "regression";
  auto& arr = doc["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(to_json(r, opts));
  return doc;
}

namespace detail {

inline const nlohmann::json& checked_reports(const nlohmann::json& doc, const char* kind) {
  if (!doc.is_object() || doc.value("schema", "") != "soilmine-report" ||
      doc.value("version", 0) != kReportSchemaVersion || doc.value("kind", "") != kind) {
    throw Error(ErrorCode::BadModel, std::string("not a version-1 ") + kind + " report document");
  }
  return doc.at("reports");
}

inline double time_or_zero(const nlohmann::json& j) {
  return j.at("build_time_s").is_null() ? 0.0 : j.at("build_time_s").get<double>();
}

}  // namespace detail

inline std::vector<EvaluationReport> evaluation_reports_from_json(const nlohmann::json& doc) {
  std::vector<EvaluationReport> out;
  try {
    for (const auto& j : detail::checked_reports(doc, "classification")) {
      EvaluationReport r;
      r.algorithm = j.at("algorithm").get<std::string>();
      r.k = j.at("k").get<std::size_t>();
      r.seed = j.at("seed").get<std::uint64_t>();
      const auto& m = j.at("metrics");
      r.correct = m.at("correct").get<std::size_t>();
      r.incorrect = m.at("incorrect").get<std::size_t>();
      r.accuracy = m.at("accuracy").get<double>();
      r.error_rate = m.at("error_rate").get<double>();
      r.mae = m.at("mae").get<double>();
      r.weighted_tpr = m.at("weighted_tpr").get<double>();
      r.weighted_fpr = m.at("weighted_fpr").get<double>();
      for (std::size_t c = 0; c < kNumClasses; ++c) {
        const auto& pc = m.at("per_class").at(c);
        r.per_class[c] = Rates{pc.at("tpr").get<double>(), pc.at("fpr").get<double>(),
                               pc.at("tpr_undefined").get<bool>(), pc.at("fpr_undefined").get<bool>()};
        for (std::size_t p = 0; p < kNumClasses; ++p) {
          r.confusion.counts[c][p] = j.at("confusion").at(c).at(p).get<std::size_t>();
        }
      }
      r.build_time_s = detail::time_or_zero(j);
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadModel, e.what());
  }
  return out;
}

inline std::vector<RegressionReport> regression_reports_from_json(const nlohmann::json& doc) {
  std::vector<RegressionReport> out;
  try {
    for (const auto& j : detail::checked_reports(doc, "regression")) {
      RegressionReport r;
      r.algorithm = j.at("algorithm").get<std::string>();
      const auto target = parse_attribute(j.at("target").get<std::string>());
      if (!target) throw Error(ErrorCode::BadModel, "unknown target attribute");
      r.target = *target;
      r.k = j.at("k").get<std::size_t>();
      r.seed = j.at("seed").get<std::uint64_t>();
      const auto& m = j.at("metrics");
      r.correlation = m.at("correlation").get<double>();
      r.correlation_undefined = m.at("correlation_undefined").get<bool>();
      r.rae_percent = m.at("rae_percent").get<double>();
      r.build_time_s = detail::time_or_zero(j);
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadModel, e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------

template <typename Report>
std::string render_reports(std::span<const Report> reports, OutputFormat format, const RenderOptions& opts = {}) {
  if (reports.empty()) throw Error(ErrorCode::Empty, "no reports to render");
  if (format == OutputFormat::Json) return reports_to_json(reports, opts).dump(2) + "\n";
  MetricTable t;
  if constexpr (std::is_same_v<Report, EvaluationReport>) {
    t = classification_table(reports, opts);
  } else {
    t = regression_table(reports, opts);
  }
  if (format == OutputFormat::Csv) return render_csv(t);
  std::string out = render_text(t);
  if constexpr (std::is_same_v<Report, EvaluationReport>) {
    for (const auto& r : reports) out += "\n" + render_confusion(r);
  }
  return out;
}

using AnyReport = std::variant<EvaluationReport, RegressionReport>;

/// Side-by-side comparison of homogeneous reports; MixedKinds otherwise.
inline std::string compare_table(std::span<const AnyReport> reports, OutputFormat format,
                                 const RenderOptions& opts = {}) {
  if (reports.empty()) throw Error(ErrorCode::Empty, "no reports to compare");
  const std::size_t kind = reports.front().index();
  for (const auto& r : reports) {
    if (r.index() != kind) throw Error(ErrorCode::MixedKinds, "classification and regression reports mixed");
  }
  if (kind == 0) {
    std::vector<EvaluationReport> v;
    for (const auto& r : reports) v.push_back(std::get<EvaluationReport>(r));
    return render_reports<EvaluationReport>(v, format, opts);
  }
  std::vector<RegressionReport> v;
  for (const auto& r : reports) v.push_back(std::get<RegressionReport>(r));
  return render_reports<RegressionReport>(v, format, opts);
}

/// Actual / Predicted / Error listing with error = predicted - actual, all at
/// three decimals.
inline std::string render_prediction_listing(std::span<const std::pair<double, double>> pairs,
                                             OutputFormat format = OutputFormat::Text) {
  if (pairs.empty()) throw Error(ErrorCode::Empty, "no predictions to list");
  std::ostringstream out;
  if (format == OutputFormat::Json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [actual, predicted] : pairs) {
      arr.push_back({{"actual", actual}, {"predicted", predicted}, {"error", predicted - actual}});
    }
    return arr.dump(2) + "\n";
  }
  if (format == OutputFormat::Csv) {
    out << "Actual,Predicted,Error\n";
    for (const auto& [actual, predicted] : pairs) {
      out << format_fixed(actual, 3) << ',' << format_fixed(predicted, 3) << ','
          << format_fixed(predicted - actual, 3) << '\n';
    }
    return out.str();
  }
  constexpr std::size_t w = 12;
  auto cell = [&](const std::string& s) { out << std::string(w > s.size() ? w - s.size() : 0, ' ') << s; };
  cell("Actual");
  cell("Predicted");
  cell("Error");
  out << '\n';
  for (const auto& [actual, predicted] : pairs) {
    cell(format_fixed(actual, 3));
    cell(format_fixed(predicted, 3));
    cell(format_fixed(predicted - actual, 3));
    out << '\n';
  }
  return out.str();
}

inline std::string render_summary(const DatasetSummary& s, OutputFormat format) {
  if (format == OutputFormat::Json) {
    nlohmann::ordered_json j;
    j["count"] = s.count;
    auto& attrs = j["attributes"] = nlohmann::ordered_json::object();
    for (Attribute a : kAllAttributes) {
      const auto& x = s.attributes[index_of(a)];
      attrs[std::string(name_of(a))] = {{"min", x.min}, {"max", x.max}, {"mean", x.mean}, {"stddev", x.stddev}};
    }
    if (s.class_histogram) {
      auto& h = j["classes"] = nlohmann::ordered_json::object();
      for (std::size_t c = 0; c < kNumClasses; ++c) h[std::string(kClassNames[c])] = (*s.class_histogram)[c];
    } else {
      j["classes"] = nullptr;
    }
    return j.dump(2) + "\n";
  }
  MetricTable t;
  t.algorithms = {"Min", "Max", "Mean", "StdDev"};
  for (Attribute a : kAllAttributes) {
    const auto& x = s.attributes[index_of(a)];
    t.rows.emplace_back(std::string(name_of(a)),
                        std::vector<std::string>{format_fixed(x.min, 3), format_fixed(x.max, 3),
                                                 format_fixed(x.mean, 3), format_fixed(x.stddev, 3)});
  }
  std::string out = format == OutputFormat::Csv ? render_csv(t) : "Instances: " + std::to_string(s.count) + "\n" + render_text(t);
  if (s.class_histogram && format == OutputFormat::Text) {
    out += "\nClass counts\n";
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      out += "  " + std::string(kClassNames[c]) + ": " + std::to_string((*s.class_histogram)[c]) + "\n";
    }
  }
  return out;
}

}  // namespace soilmine
