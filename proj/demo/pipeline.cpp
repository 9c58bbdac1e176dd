// Runs the whole pipeline in-process on the default synthetic dataset:
// label with the rules, compare the classifiers, predict P.

#include <iostream>
#include <vector>

#include "soilmine/soilmine.hpp"

namespace sm = soilmine;

int main() {
  const auto cfg = sm::default_synth_config();
  const sm::Dataset raw = sm::generate_synthetic(cfg);
  const sm::Dataset labeled =
      sm::inject_label_noise(sm::label_dataset(sm::default_ruleset(), raw), cfg.label_noise, cfg.seed);

  std::cout << sm::render_summary(sm::dataset_summary(labeled), sm::OutputFormat::Text) << "\n";

  std::vector<sm::EvaluationReport> cls;
  for (auto kind : {sm::ClassifierKind::NaiveBayes, sm::ClassifierKind::Ripper, sm::ClassifierKind::C45}) {
    sm::ClassifierSpec spec;
    spec.kind = kind;
    cls.push_back(sm::cross_validate_classifier(spec, labeled, {10, 42, 0}));
  }
  std::cout << sm::render_reports<sm::EvaluationReport>(cls, sm::OutputFormat::Text, {true}) << "\n";

  std::vector<sm::RegressionReport> reg;
  std::vector<std::pair<double, double>> first_rows;
  for (auto kind : {sm::RegressorKind::Ols, sm::RegressorKind::Lms}) {
    sm::RegressorSpec spec;
    spec.kind = kind;
    auto run = sm::cross_validate_regressor(spec, labeled, sm::Attribute::P, {10, 42, 0});
    reg.push_back(run.report);
    if (kind == sm::RegressorKind::Ols) {
      for (std::size_t i = 0; i < 11; ++i) first_rows.emplace_back(run.actual[i], run.predicted[i]);
    }
  }
  std::cout << sm::render_reports<sm::RegressionReport>(reg, sm::OutputFormat::Text, {true}) << "\n";
  std::cout << sm::render_prediction_listing(first_rows);
  return 0;
}
