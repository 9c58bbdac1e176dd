#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "soilmine/soilmine.hpp"

namespace sm = soilmine;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kDataError = 3, kInternal = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string data;
  std::string rules;
  std::string out;
  std::string format = "text";
  std::size_t k = 10;
  std::uint64_t seed = 42;
  std::string target = "P";
  std::string algorithms;
  std::size_t n = 1988;
  double label_noise = 0.0;
  std::size_t jobs = 1;
  bool timings = false;
  bool listing = false;
  std::string save_models;
  std::string impute = "reject";
};

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw sm::Error(sm::ErrorCode::Io, "cannot write '" + o.out + "'");
  f << text;
  if (!f) throw sm::Error(sm::ErrorCode::Io, "write to '" + o.out + "' failed");
}

sm::OutputFormat output_format(const Options& o) {
  const auto f = sm::parse_output_format(o.format);
  if (!f) throw UsageError("--format must be text, csv or json");
  return *f;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::size_t end = comma == std::string::npos ? s.size() : comma;
    std::string item(sm::trim(std::string_view(s).substr(start, end - start)));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

sm::Dataset load(const Options& o, bool require_labels) {
  if (o.data.empty()) throw UsageError("--data is required");
  sm::ImputeStrategy strategy;
  if (o.impute == "reject") {
    strategy = sm::ImputeStrategy::Reject;
  } else if (o.impute == "mean") {
    strategy = sm::ImputeStrategy::ColumnMean;
  } else {
    throw UsageError("--impute must be reject or mean");
  }
  return sm::load_csv(o.data, require_labels, strategy);
}

sm::CvOptions cv_options(const Options& o) {
  if (o.k < 2) throw UsageError("--k must be at least 2");
  return sm::CvOptions{o.k, o.seed, o.jobs};
}

int cmd_synth(const Options& o) {
  auto cfg = sm::default_synth_config();
  cfg.n = o.n;
  cfg.seed = o.seed;
  emit(o, sm::to_csv(sm::generate_synthetic(cfg)));
  return kOk;
}

int cmd_label(const Options& o) {
  if (o.label_noise < 0.0 || o.label_noise > 1.0) throw UsageError("--label-noise must lie in [0, 1]");
  const sm::RuleSet rules = o.rules.empty() ? sm::default_ruleset() : sm::load_rules(o.rules);
  sm::Dataset d = sm::label_dataset(rules, load(o, false));
  if (o.label_noise > 0.0) d = sm::inject_label_noise(d, o.label_noise, o.seed);
  emit(o, sm::to_csv(d));
  return kOk;
}

int cmd_compare(const Options& o) {
  const auto format = output_format(o);
  std::vector<sm::ClassifierSpec> specs;
  for (const auto& name : split_list(o.algorithms.empty() ? "nb,c45,ripper" : o.algorithms)) {
    const auto kind = sm::parse_classifier_kind(name);
    if (!kind) throw UsageError("unknown classifier '" + name + "' (expected nb, c45, ripper or majority)");
    sm::ClassifierSpec spec;
    spec.kind = *kind;
    spec.ripper.seed = o.seed;
    specs.push_back(spec);
  }
  const auto cv = cv_options(o);
  const sm::Dataset d = load(o, true);

  std::vector<sm::EvaluationReport> reports;
  for (const auto& spec : specs) {
    reports.push_back(sm::cross_validate_classifier(spec, d, cv));
    if (!o.save_models.empty()) {
      std::filesystem::create_directories(o.save_models);
      const auto path = std::filesystem::path(o.save_models) / (spec.tag() + ".json");
      std::ofstream f(path);
      f << sm::to_json(sm::train_classifier(spec, d)).dump(2) << '\n';
      if (!f) throw sm::Error(sm::ErrorCode::Io, "cannot write '" + path.string() + "'");
    }
  }
  emit(o, sm::render_reports<sm::EvaluationReport>(reports, format, {o.timings}));
  return kOk;
}

int cmd_predict(const Options& o) {
  const auto format = output_format(o);
  const auto target = sm::parse_attribute(o.target);
  if (!target) throw UsageError("unknown target attribute '" + o.target + "'");
  std::vector<sm::RegressorSpec> specs;
  for (const auto& name : split_list(o.algorithms.empty() ? "ols,lms" : o.algorithms)) {
    const auto kind = sm::parse_regressor_kind(name);
    if (!kind) throw UsageError("unknown regressor '" + name + "' (expected ols, lms, simple or mean)");
    sm::RegressorSpec spec;
    spec.kind = *kind;
    spec.lms.seed = o.seed;
    specs.push_back(spec);
  }
  const auto cv = cv_options(o);
  const sm::Dataset d = load(o, false);

  std::vector<sm::RegressionRun> runs;
  std::vector<sm::RegressionReport> reports;
  for (const auto& spec : specs) {
    runs.push_back(sm::cross_validate_regressor(spec, d, *target, cv));
    reports.push_back(runs.back().report);
    if (!o.save_models.empty()) {
      std::filesystem::create_directories(o.save_models);
      auto model = runs.back().full_model;
      if (!o.timings) model.meta.build_time_s = 0.0;
      const auto path = std::filesystem::path(o.save_models) / (spec.tag() + ".json");
      std::ofstream f(path);
      f << sm::to_json(model).dump(2) << '\n';
      if (!f) throw sm::Error(sm::ErrorCode::Io, "cannot write '" + path.string() + "'");
    }
  }

  auto pairs_of = [](const sm::RegressionRun& run) {
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < run.actual.size(); ++i) pairs.emplace_back(run.actual[i], run.predicted[i]);
    return pairs;
  };

  if (format == sm::OutputFormat::Json) {
    auto doc = sm::reports_to_json<sm::RegressionReport>(reports, {o.timings});
    if (o.listing) {
      auto& listings = doc["listings"] = nlohmann::ordered_json::object();
      for (const auto& run : runs) {
        listings[run.report.algorithm] =
            nlohmann::ordered_json::parse(sm::render_prediction_listing(pairs_of(run), format));
      }
    }
    emit(o, doc.dump(2) + "\n");
    return kOk;
  }
  std::string text = sm::render_reports<sm::RegressionReport>(reports, format, {o.timings});
  if (o.listing) {
    for (const auto& run : runs) {
      text += "\nPredictions (" + run.report.algorithm + ", out-of-fold)\n";
      text += sm::render_prediction_listing(pairs_of(run), format);
    }
  }
  emit(o, text);
  return kOk;
}

int cmd_summary(const Options& o) {
  const auto format = output_format(o);
  emit(o, sm::render_summary(sm::dataset_summary(load(o, false)), format));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"soilmine: soil fertility labelling, classifier comparison and nutrient prediction"};
  app.require_subcommand(1);
  Options o;

  auto add_data = [&](CLI::App* c) {
    c->add_option("--data", o.data, "input CSV")->required();
    c->add_option("--impute", o.impute, "missing values: reject or mean")->capture_default_str();
  };
  auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out, "output path (default: stdout)"); };
  auto add_format = [&](CLI::App* c) {
    c->add_option("--format", o.format, "text, csv or json")->capture_default_str();
  };
  auto add_cv = [&](CLI::App* c) {
    c->add_option("--k", o.k, "folds")->capture_default_str();
    c->add_option("--seed", o.seed, "seed for folds and learners")->capture_default_str();
    c->add_option("--jobs", o.jobs, "parallel folds (0 = all cores)")->capture_default_str();
    c->add_flag("--timings", o.timings, "include build times in the report");
    c->add_option("--save-models", o.save_models, "directory for trained model JSON");
  };

  auto* synth = app.add_subcommand("synth", "generate a synthetic soil dataset");
  synth->add_option("--n", o.n, "instances")->capture_default_str();
  synth->add_option("--seed", o.seed, "generator seed")->capture_default_str();
  add_out(synth);

  auto* label = app.add_subcommand("label", "label a dataset with the fertility rules");
  add_data(label);
  label->add_option("--rules", o.rules, "rule set JSON (default: built-in rules)");
  label->add_option("--label-noise", o.label_noise, "fraction of labels to corrupt")->capture_default_str();
  label->add_option("--seed", o.seed, "label noise seed")->capture_default_str();
  add_out(label);

  auto* compare = app.add_subcommand("compare", "cross-validate classifiers");
  add_data(compare);
  compare->add_option("--algorithms", o.algorithms, "comma list of nb,c45,ripper,majority");
  add_cv(compare);
  add_format(compare);
  add_out(compare);

  auto* predict = app.add_subcommand("predict", "cross-validate regressors for one attribute");
  add_data(predict);
  predict->add_option("--target", o.target, "attribute to predict")->capture_default_str();
  predict->add_option("--algorithms", o.algorithms, "comma list of ols,lms,simple,mean");
  predict->add_flag("--listing", o.listing, "append per-instance actual/predicted/error");
  add_cv(predict);
  add_format(predict);
  add_out(predict);

  auto* summary = app.add_subcommand("summary", "per-attribute statistics");
  add_data(summary);
  add_format(summary);
  add_out(summary);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(o);
    if (label->parsed()) return cmd_label(o);
    if (compare->parsed()) return cmd_compare(o);
    if (predict->parsed()) return cmd_predict(o);
    if (summary->parsed()) return cmd_summary(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const sm::Error& e) {
    std::cerr << "data error [" << sm::to_string(e.code()) << "]: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  std::cerr << "internal error: no command ran\n";
  return kInternal;
}
