#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "soilmine/c45.hpp"
#include "soilmine/class_distribution.hpp"
#include "soilmine/dataset.hpp"
#include "soilmine/error.hpp"
#include "soilmine/linear_model.hpp"
#include "soilmine/naive_bayes.hpp"
#include "soilmine/regression.hpp"
#include "soilmine/ripper.hpp"

namespace soilmine {

// ---------------------------------------------------------------------------
// Classifiers

enum class ClassifierKind { NaiveBayes, C45, Ripper, Majority };

/// Which classifier to train and with what parameters. `Majority` always
/// predicts the most frequent training class; it is a baseline, not one of the
/// compared learners.
struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::C45;
  C45Params c45;
  RipperParams ripper;

  std::string tag() const {
    switch (kind) {
      case ClassifierKind::NaiveBayes: return "nb";
      case ClassifierKind::C45: return "c45";
      case ClassifierKind::Ripper: return "ripper";
      case ClassifierKind::Majority: return "majority";
    }
    return "?";
  }
};

inline std::optional<ClassifierKind> parse_classifier_kind(std::string_view name) {
  if (name == "nb") return ClassifierKind::NaiveBayes;
  if (name == "c45") return ClassifierKind::C45;
  if (name == "ripper") return ClassifierKind::Ripper;
  if (name == "majority") return ClassifierKind::Majority;
  return std::nullopt;
}

struct MajorityModel {
  ClassCounts counts{};

  friend bool operator==(const MajorityModel&, const MajorityModel&) = default;
};

using ClassifierModel = std::variant<NaiveBayesModel, DecisionTree, RuleList, MajorityModel>;

inline ClassifierModel train_classifier(const ClassifierSpec& spec, const Dataset& d) {
  switch (spec.kind) {
    case ClassifierKind::NaiveBayes: return train_naive_bayes(d);
    case ClassifierKind::C45: return train_c45(d, spec.c45);
    case ClassifierKind::Ripper: return train_ripper(d, spec.ripper);
    case ClassifierKind::Majority: {
      if (d.empty()) throw Error(ErrorCode::EmptyDataset, "majority baseline needs training data");
      if (!d.labels) throw Error(ErrorCode::UnlabeledDataset, "majority baseline needs labels");
      MajorityModel m;
      for (FertilityClass c : *d.labels) m.counts[index_of(c)] += 1.0;
      return m;
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown classifier kind");
}

inline ClassDistribution predict_distribution(const ClassifierModel& model, const SoilSample& s) {
  struct Visitor {
    const SoilSample& s;
    ClassDistribution operator()(const NaiveBayesModel& m) const { return nb_predict(m, s); }
    ClassDistribution operator()(const DecisionTree& t) const { return c45_predict(t, s); }
    ClassDistribution operator()(const RuleList& r) const { return ripper_predict(r, s); }
    ClassDistribution operator()(const MajorityModel& m) const { return ClassDistribution::laplace(m.counts); }
  };
  return std::visit(Visitor{s}, model);
}

inline FertilityClass predict_class(const ClassifierModel& model, const SoilSample& s) {
  return predict_distribution(model, s).argmax();
}

// ---------------------------------------------------------------------------
// Regressors

enum class RegressorKind { Ols, Lms, Simple, Mean };

/// `Mean` predicts the training mean of the target; a baseline for RAE.
struct RegressorSpec {
  RegressorKind kind = RegressorKind::Ols;
  bool select = true;  // OLS attribute elimination
  LmsConfig lms;

  std::string tag() const {
    switch (kind) {
      case RegressorKind::Ols: return "ols";
      case RegressorKind::Lms: return "lms";
      case RegressorKind::Simple: return "simple";
      case RegressorKind::Mean: return "mean";
    }
    return "?";
  }
};

inline std::optional<RegressorKind> parse_regressor_kind(std::string_view name) {
  if (name == "ols") return RegressorKind::Ols;
  if (name == "lms") return RegressorKind::Lms;
  if (name == "simple") return RegressorKind::Simple;
  if (name == "mean") return RegressorKind::Mean;
  return std::nullopt;
}

inline LinearModel fit_regressor(const RegressorSpec& spec, const Dataset& d, Attribute target) {
  switch (spec.kind) {
    case RegressorKind::Ols: return fit_ols(d, target, spec.select);
    case RegressorKind::Lms: return fit_lms(d, target, spec.lms);
    case RegressorKind::Simple: return fit_simple(d, target);
    case RegressorKind::Mean: {
      if (d.empty()) throw Error(ErrorCode::TooFewRows, "mean baseline needs at least 1 row");
      LinearModel m;
      m.target = target;
      double sum = 0.0;
      for (const auto& r : d.rows) sum += r[target];
      m.intercept = sum / static_cast<double>(d.size());
      m.meta.algorithm = "mean";
      return m;
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown regressor kind");
}

}  // namespace soilmine
