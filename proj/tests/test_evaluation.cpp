#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "soilmine/cross_validation.hpp"
#include "soilmine/default_rules.hpp"
#include "soilmine/report.hpp"
#include "soilmine/rules.hpp"
#include "soilmine/synth.hpp"

using namespace soilmine;

namespace {

using FC = FertilityClass;

Dataset labeled(const std::vector<FC>& labels) {
  Dataset d;
  d.labels = labels;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    SoilSample s;
    s.values.fill(1.0);
    s[Attribute::Ph] = static_cast<double>(i % 14);
    d.rows.push_back(s);
  }
  return d;
}

Dataset pipeline_data(std::size_t n = 1988) {
  auto cfg = default_synth_config();
  cfg.n = n;
  return inject_label_noise(label_dataset(default_ruleset(), generate_synthetic(cfg)), cfg.label_noise, cfg.seed);
}

ConfusionMatrix diagonal(std::size_t per_class) {
  ConfusionMatrix c;
  for (std::size_t k = 0; k < kNumClasses; ++k) c.counts[k][k] = per_class;
  return c;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::Empty;
}

// Reference correct counts out of 1988, as a one-class-heavy confusion matrix.
EvaluationReport reference_report(const std::string& name, std::size_t correct) {
  EvaluationReport r;
  r.algorithm = name;
  r.k = 10;
  r.seed = 42;
  r.confusion.counts[0][0] = correct;
  r.confusion.counts[0][1] = 1988 - correct;
  r.correct = correct;
  r.incorrect = 1988 - correct;
  r.accuracy = accuracy(r.confusion);
  r.error_rate = error_rate(r.confusion);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// folds

TEST(Folds, LeaveOneOut) {
  const Dataset d = labeled({FC::Low, FC::Low, FC::High, FC::High, FC::Moderate});
  const Folds f = stratified_k_fold(d, 5, 1);
  for (const auto& fold : f) EXPECT_EQ(fold.size(), 1u);
}

TEST(Folds, TwelveRowsTwoClassesThreeFolds) {
  std::vector<FC> labels(6, FC::Low);
  labels.insert(labels.end(), 6, FC::High);
  const Dataset d = labeled(labels);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (const auto& fold : stratified_k_fold(d, 3, seed)) {
      std::size_t low = 0;
      for (std::size_t i : fold) low += labels[i] == FC::Low;
      EXPECT_EQ(low, 2u);
      EXPECT_EQ(fold.size(), 4u);
    }
  }
}

TEST(Folds, SyntheticTenFoldSizesAndProportions) {
  const Dataset d = pipeline_data();
  const Folds f = stratified_k_fold(d, 10, 42);
  std::array<double, kNumClasses> global{};
  for (FC c : *d.labels) global[index_of(c)] += 1.0;
  std::set<std::size_t> all;
  for (const auto& fold : f) {
    EXPECT_TRUE(fold.size() == 198 || fold.size() == 199) << fold.size();
    std::array<double, kNumClasses> here{};
    for (std::size_t i : fold) {
      here[index_of((*d.labels)[i])] += 1.0;
      EXPECT_TRUE(all.insert(i).second);
    }
    for (std::size_t c = 0; c < kNumClasses; ++c) EXPECT_LE(std::abs(here[c] - global[c] / 10.0), 1.0);
  }
  EXPECT_EQ(all.size(), d.size());
}

TEST(Folds, PureFunctionOfLabelsKAndSeed) {
  const Dataset d = pipeline_data(300);
  EXPECT_EQ(stratified_k_fold(d, 7, 5), stratified_k_fold(d, 7, 5));
  EXPECT_NE(stratified_k_fold(d, 7, 5), stratified_k_fold(d, 7, 6));
  Dataset moved = d;
  for (auto& r : moved.rows) r[Attribute::K] += 1.0;
  EXPECT_EQ(stratified_k_fold(moved, 7, 5), stratified_k_fold(d, 7, 5));
}

TEST(Folds, Errors) {
  const Dataset d = labeled({FC::Low, FC::High, FC::Low});
  EXPECT_EQ(code_of([&] { stratified_k_fold(d, 1, 0); }), ErrorCode::BadK);
  EXPECT_EQ(code_of([&] { stratified_k_fold(d, 4, 0); }), ErrorCode::BadK);
  Dataset unlabeled = d;
  unlabeled.labels.reset();
  EXPECT_EQ(code_of([&] { stratified_k_fold(unlabeled, 2, 0); }), ErrorCode::UnlabeledDataset);
}

TEST(Folds, UnstratifiedPartition) {
  const Folds f = k_fold(23, 4, 3);
  std::vector<std::size_t> all;
  for (const auto& fold : f) all.insert(all.end(), fold.begin(), fold.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < 23; ++i) EXPECT_EQ(all[i], i);
}

// ---------------------------------------------------------------------------
// metrics

TEST(Accuracy, ReferenceCounts) {
  // 765 of 1988 is 38.48%; the 38.40% printed next to it does not follow from the count
  EXPECT_NEAR(100.0 * reference_report("nb", 765).accuracy, 38.48, 0.005);
  EXPECT_NEAR(100.0 * reference_report("ripper", 1794).accuracy, 90.24, 0.005);
  EXPECT_NEAR(100.0 * reference_report("c45", 1827).accuracy, 91.90, 0.005);
}

TEST(Accuracy, DiagonalIsOneAndErrorRateComplements) {
  EXPECT_EQ(accuracy(diagonal(3)), 1.0);
  const auto r = reference_report("x", 1794);
  EXPECT_EQ(r.accuracy + r.error_rate, 1.0);
  EXPECT_EQ(code_of([] { accuracy(ConfusionMatrix{}); }), ErrorCode::EmptyMatrix);
}

TEST(Mae, ClosedForms) {
  const std::vector<FC> truth{FC::Low, FC::High};
  const std::vector<ClassDistribution> perfect{ClassDistribution::one_hot(FC::Low),
                                               ClassDistribution::one_hot(FC::High)};
  EXPECT_EQ(mae_classification(perfect, truth), 0.0);
  ClassDistribution uniform;
  uniform.p.fill(1.0 / 6.0);
  const std::vector<ClassDistribution> flat{uniform, uniform};
  EXPECT_NEAR(mae_classification(flat, truth), 2.0 * 5.0 / 36.0, 1e-15);
}

TEST(Mae, ThreeInstanceHandSum) {
  ClassDistribution a, b, c;
  a.p = {0.5, 0.5, 0, 0, 0, 0};      // truth VeryLow: 0.5 + 0.5 = 1.0
  b.p = {0, 0.2, 0.7, 0.1, 0, 0};    // truth Moderate: 0.2 + 0.3 + 0.1 = 0.6
  c.p = {0, 0, 0, 0, 0.25, 0.75};    // truth VeryLow: 1 + 0.25 + 0.75 = 2.0
  const std::vector<ClassDistribution> preds{a, b, c};
  const std::vector<FC> truth{FC::VeryLow, FC::Moderate, FC::VeryLow};
  EXPECT_NEAR(mae_classification(preds, truth), (1.0 + 0.6 + 2.0) / 6.0 / 3.0, 1e-12);
  const std::vector<FC> short_truth{FC::Low};
  EXPECT_EQ(code_of([&] { mae_classification(preds, short_truth); }), ErrorCode::LengthMismatch);
}

TEST(Rates, PerfectMatrix) {
  const auto c = diagonal(4);
  for (FC k : kAllClasses) {
    const auto r = tpr_fpr(c, k);
    EXPECT_EQ(r.tpr, 1.0);
    EXPECT_EQ(r.fpr, 0.0);
  }
}

TEST(Rates, AbsentClassIsZeroAndFlagged) {
  ConfusionMatrix c;
  c.counts[0][0] = 5;
  c.counts[1][0] = 2;
  const auto r = tpr_fpr(c, FC::VeryHigh);
  EXPECT_EQ(r.tpr, 0.0);
  EXPECT_TRUE(r.tpr_undefined);
  EXPECT_FALSE(r.fpr_undefined);
}

TEST(Rates, ThreeByThreeFixture) {
  // actual x predicted over VeryLow, Low, Moderate:
  //   [5 1 0]
  //   [2 6 2]
  //   [0 1 3]
  ConfusionMatrix c;
  c.counts[0] = {5, 1, 0, 0, 0, 0};
  c.counts[1] = {2, 6, 2, 0, 0, 0};
  c.counts[2] = {0, 1, 3, 0, 0, 0};
  const auto low = tpr_fpr(c, FC::Low);
  EXPECT_DOUBLE_EQ(low.tpr, 6.0 / 10.0);
  EXPECT_DOUBLE_EQ(low.fpr, 2.0 / 10.0);
  const auto vl = tpr_fpr(c, FC::VeryLow);
  EXPECT_DOUBLE_EQ(vl.tpr, 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(vl.fpr, 2.0 / 14.0);
  std::size_t tp = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) tp += c.counts[k][k];
  EXPECT_EQ(tp, c.trace());
}

TEST(Correlation, IdentityAndAntiAndOracle) {
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> neg{-1, -2, -3, -4};
  EXPECT_NEAR(correlation_coefficient(a, a), 1.0, 1e-15);
  EXPECT_NEAR(correlation_coefficient(neg, a), -1.0, 1e-15);
  // {1,2,4} vs {1,2,3}: means 7/3 and 2; sxy = 3, sxx = 14/3, syy = 2
  const std::vector<double> p{1, 2, 4}, q{1, 2, 3};
  EXPECT_NEAR(correlation_coefficient(p, q), 3.0 / std::sqrt(28.0 / 3.0), 1e-12);
}

TEST(Correlation, AffineInvarianceAndErrors) {
  const std::vector<double> p{1, 5, 2, 8, 3}, q{2, 4, 1, 9, 5};
  std::vector<double> t;
  for (double v : p) t.push_back(3.5 * v - 7.0);
  EXPECT_NEAR(correlation_coefficient(t, q), correlation_coefficient(p, q), 1e-12);
  const std::vector<double> flat{2, 2, 2, 2, 2};
  EXPECT_EQ(code_of([&] { correlation_coefficient(flat, q); }), ErrorCode::ZeroVariance);
  const std::vector<double> one{1};
  EXPECT_THROW(correlation_coefficient(one, one), Error);
}

TEST(Rae, FixturesAndBaseline) {
  const std::vector<double> actual{1, 3, 5, 7};
  EXPECT_EQ(relative_absolute_error(actual, actual, 4.0), 0.0);
  const std::vector<double> base(4, 4.0);
  EXPECT_DOUBLE_EQ(relative_absolute_error(base, actual, 4.0), 100.0);
  // |2-1| + |3-3| + |4-5| + |9-7| = 4 over |1-4|+|3-4|+|5-4|+|7-4| = 8
  const std::vector<double> pred{2, 3, 4, 9};
  EXPECT_DOUBLE_EQ(relative_absolute_error(pred, actual, 4.0), 50.0);
  const std::vector<double> same{4, 4};
  EXPECT_EQ(code_of([&] { relative_absolute_error(same, same, 4.0); }), ErrorCode::DegenerateBaseline);
}

// ---------------------------------------------------------------------------
// harness

TEST(CrossValidation, MajorityOnNinetyTenIsPointNine) {
  std::vector<FC> labels(90, FC::High);
  labels.insert(labels.end(), 10, FC::Low);
  ClassifierSpec spec;
  spec.kind = ClassifierKind::Majority;
  const auto r = cross_validate_classifier(spec, labeled(labels), {10, 1, 1});
  EXPECT_DOUBLE_EQ(r.accuracy, 0.9);
  EXPECT_EQ(r.correct + r.incorrect, 100u);
}

TEST(CrossValidation, DeterministicAndJobsInvariant) {
  const Dataset d = pipeline_data(400);
  for (ClassifierKind k : {ClassifierKind::NaiveBayes, ClassifierKind::C45, ClassifierKind::Ripper}) {
    ClassifierSpec spec;
    spec.kind = k;
    auto a = cross_validate_classifier(spec, d, {10, 42, 1});
    auto b = cross_validate_classifier(spec, d, {10, 42, 1});
    auto c = cross_validate_classifier(spec, d, {10, 42, 4});
    a.build_time_s = b.build_time_s = c.build_time_s = 0;
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
  }
}

TEST(CrossValidation, ReportInvariants) {
  const Dataset d = pipeline_data(500);
  const Dataset copy = d;
  ClassifierSpec spec;
  spec.kind = ClassifierKind::NaiveBayes;
  const auto r = cross_validate_classifier(spec, d);
  EXPECT_EQ(d, copy);
  EXPECT_EQ(r.correct + r.incorrect, d.size());
  EXPECT_EQ(r.confusion.total(), d.size());
  EXPECT_DOUBLE_EQ(r.accuracy, static_cast<double>(r.confusion.trace()) / r.confusion.total());
  for (const auto& rate : r.per_class) {
    EXPECT_GE(rate.tpr, 0.0);
    EXPECT_LE(rate.tpr, 1.0);
    EXPECT_GE(rate.fpr, 0.0);
    EXPECT_LE(rate.fpr, 1.0);
  }
}

TEST(CrossValidation, TrainerErrorsCarryFoldIndex) {
  Dataset d = labeled(std::vector<FC>(20, FC::Low));
  ClassifierSpec spec;
  spec.kind = ClassifierKind::C45;
  spec.c45.prune_confidence = 2.0;
  try {
    cross_validate_classifier(spec, d, {5, 1, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
    ASSERT_TRUE(e.fold());
    EXPECT_EQ(*e.fold(), 0u);
    EXPECT_NE(std::string(e.what()).find("in fold 0"), std::string::npos);
  }
}

TEST(CrossValidation, C45AboveNaiveBayesOnNoisyRuleLabels) {
  const Dataset d = pipeline_data();
  ClassifierSpec c45, nb;
  c45.kind = ClassifierKind::C45;
  nb.kind = ClassifierKind::NaiveBayes;
  const double tree = cross_validate_classifier(c45, d).accuracy;
  EXPECT_GE(tree, 0.85);
  EXPECT_GT(tree, cross_validate_classifier(nb, d).accuracy);
}

TEST(RegressionHarness, NoiseFreeOlsIsExact) {
  auto cfg = default_synth_config();
  cfg.n = 300;
  cfg.p_noise_sd = 0.0;
  const Dataset d = generate_synthetic(cfg);
  RegressorSpec spec;
  spec.select = false;
  const auto run = cross_validate_regressor(spec, d, Attribute::P);
  EXPECT_NEAR(run.report.correlation, 1.0, 1e-6);
  EXPECT_LT(run.report.rae_percent, 1e-6);
}

TEST(RegressionHarness, MeanFitterIsAboutOneHundredPercent) {
  auto cfg = default_synth_config();
  cfg.n = 300;
  RegressorSpec spec;
  spec.kind = RegressorKind::Mean;
  const auto run = cross_validate_regressor(spec, generate_synthetic(cfg), Attribute::P);
  EXPECT_NEAR(run.report.rae_percent, 100.0, 1e-9);
  EXPECT_TRUE(run.report.correlation_undefined == false || run.report.correlation == 0.0);
}

TEST(RegressionHarness, PooledRaeUsesTrainingMeans) {
  auto cfg = default_synth_config();
  cfg.n = 60;
  const Dataset d = generate_synthetic(cfg);
  RegressorSpec spec;
  spec.kind = RegressorKind::Simple;
  const auto run = cross_validate_regressor(spec, d, Attribute::P, {5, 9, 1});
  const Folds f = k_fold(d.size(), 5, 9);
  double num = 0, den = 0;
  for (const auto& fold : f) {
    double sum = 0;
    const auto train = complement(d.size(), fold);
    for (std::size_t i : train) sum += d.rows[i].p();
    const double mean = sum / train.size();
    for (std::size_t i : fold) {
      num += std::abs(run.predicted[i] - d.rows[i].p());
      den += std::abs(d.rows[i].p() - mean);
    }
  }
  EXPECT_NEAR(run.report.rae_percent, 100.0 * num / den, 1e-9);
}

// ---------------------------------------------------------------------------
// reports

TEST(Report, ReferenceAccuraciesRender) {
  const std::vector<AnyReport> reports{reference_report("nb", 765), reference_report("ripper", 1794),
                                       reference_report("c45", 1827)};
  const std::string text = compare_table(reports, OutputFormat::Text);
  EXPECT_NE(text.find("38.48%"), std::string::npos);
  EXPECT_NE(text.find("90.24%"), std::string::npos);
  EXPECT_NE(text.find("91.90%"), std::string::npos);
  EXPECT_NE(text.find("Correctly Classified Instances"), std::string::npos);
  const std::string csv = compare_table(reports, OutputFormat::Csv);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "Metric,nb,ripper,c45");
  EXPECT_NE(csv.find("Accuracy,38.48%,90.24%,91.90%"), std::string::npos);
}

TEST(Report, SingleReportHasOneColumnAndRowOrder) {
  const std::vector<AnyReport> one{reference_report("c45", 1827)};
  const std::string csv = compare_table(one, OutputFormat::Csv);
  const std::vector<std::string> want{"Metric,c45",
                                      "Correctly Classified Instances,1827",
                                      "Incorrectly Classified Instances,161",
                                      "Accuracy,91.90%",
                                      "Mean Absolute Error,0.0000",
                                      "Error Rate,8.10%"};
  std::size_t pos = 0;
  for (const auto& line : want) {
    const std::size_t end = csv.find('\n', pos);
    EXPECT_EQ(csv.substr(pos, end - pos), line);
    pos = end + 1;
  }
}

TEST(Report, MixedKindsRejected) {
  RegressionReport reg;
  reg.algorithm = "ols";
  const std::vector<AnyReport> mixed{reference_report("c45", 1827), reg};
  EXPECT_EQ(code_of([&] { compare_table(mixed, OutputFormat::Text); }), ErrorCode::MixedKinds);
}

TEST(Report, ClassificationJsonRoundTripsExactly) {
  const Dataset d = pipeline_data(300);
  std::vector<EvaluationReport> reports;
  for (ClassifierKind k : {ClassifierKind::NaiveBayes, ClassifierKind::C45}) {
    ClassifierSpec spec;
    spec.kind = k;
    reports.push_back(cross_validate_classifier(spec, d));
  }
  const std::string text = render_reports<EvaluationReport>(reports, OutputFormat::Json, {true});
  EXPECT_EQ(evaluation_reports_from_json(nlohmann::json::parse(text)), reports);
}

TEST(Report, RegressionJsonRoundTripsExactly) {
  auto cfg = default_synth_config();
  cfg.n = 200;
  const Dataset d = generate_synthetic(cfg);
  std::vector<RegressionReport> reports;
  for (RegressorKind k : {RegressorKind::Ols, RegressorKind::Simple}) {
    RegressorSpec spec;
    spec.kind = k;
    reports.push_back(cross_validate_regressor(spec, d, Attribute::P).report);
  }
  const std::string text = render_reports<RegressionReport>(reports, OutputFormat::Json, {true});
  EXPECT_EQ(regression_reports_from_json(nlohmann::json::parse(text)), reports);
}

TEST(Report, TimingsOmittedByDefault) {
  auto r = reference_report("c45", 1827);
  r.build_time_s = 1.234;
  const std::vector<EvaluationReport> v{r};
  EXPECT_EQ(render_reports<EvaluationReport>(v, OutputFormat::Csv).find("Time"), std::string::npos);
  EXPECT_NE(render_reports<EvaluationReport>(v, OutputFormat::Csv, {true}).find("1.23"), std::string::npos);
  const auto j = nlohmann::json::parse(render_reports<EvaluationReport>(v, OutputFormat::Json));
  EXPECT_TRUE(j["reports"][0]["build_time_s"].is_null());
}

TEST(Report, RegressionRowFormatting) {
  RegressionReport r;
  r.algorithm = "ols";
  r.correlation = 0.98104;
  r.rae_percent = 10.7749;
  r.build_time_s = 0.031;
  const std::vector<RegressionReport> v{r};
  const std::string csv = render_reports<RegressionReport>(v, OutputFormat::Csv, {true});
  EXPECT_NE(csv.find("Time taken to build the model (s),0.03"), std::string::npos);
  EXPECT_NE(csv.find("Relative Absolute Error,10.77%"), std::string::npos);
  EXPECT_NE(csv.find("Correlation Coefficient,0.9810"), std::string::npos);
}

TEST(Listing, ReferenceListingErrorsAtThreeDecimals) {
  const std::vector<std::pair<double, double>> rows{
      {10.3, 10.661}, {7.7, 7.431}, {4.6, 4.653},  {9.5, 8.478},   {2.9, 3.035}, {5.1, 4.915},
      {15.3, 15.667}, {7, 7.402},   {18.4, 18.743}, {4.4, 4.388}, {13.5, 13.438}};
  const std::vector<std::string> errors{"0.361", "-0.269", "0.053", "-1.022", "0.135", "-0.185",
                                        "0.367", "0.402",  "0.343", "-0.012", "-0.062"};
  const std::string csv = render_prediction_listing(rows, OutputFormat::Csv);
  std::size_t pos = csv.find('\n') + 1;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t end = csv.find('\n', pos);
    const std::string line = csv.substr(pos, end - pos);
    EXPECT_EQ(line.substr(line.rfind(',') + 1), errors[i]) << line;
    pos = end + 1;
  }
  const std::string text = render_prediction_listing(rows);
  EXPECT_NE(text.find("Actual"), std::string::npos);
  EXPECT_NE(text.find("-1.022"), std::string::npos);
}

TEST(Listing, IdentityIsZeroAndEmptyRejected) {
  const std::vector<std::pair<double, double>> same{{3.3, 3.3}};
  EXPECT_NE(render_prediction_listing(same, OutputFormat::Csv).find("3.300,3.300,0.000"), std::string::npos);
  const std::vector<std::pair<double, double>> none;
  EXPECT_EQ(code_of([&] { render_prediction_listing(none); }), ErrorCode::Empty);
}
