#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>

#include "soilmine/attributes.hpp"
#include "soilmine/class_distribution.hpp"
#include "soilmine/error.hpp"

namespace soilmine {

/// Rows are actual classes, columns predicted classes.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, kNumClasses>, kNumClasses> counts{};

  void add(FertilityClass actual, FertilityClass predicted) {
    ++counts[index_of(actual)][index_of(predicted)];
  }

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& row : counts) {
      for (std::size_t v : row) t += v;
    }
    return t;
  }

  std::size_t trace() const {
    std::size_t t = 0;
    for (std::size_t c = 0; c < kNumClasses; ++c) t += counts[c][c];
    return t;
  }

  std::size_t actual_count(FertilityClass c) const {
    std::size_t t = 0;
    for (std::size_t v : counts[index_of(c)]) t += v;
    return t;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

inline double accuracy(const ConfusionMatrix& c) {
  const std::size_t total = c.total();
  if (total == 0) throw Error(ErrorCode::EmptyMatrix, "accuracy of an empty confusion matrix");
  return static_cast<double>(c.trace()) / static_cast<double>(total);
}

/// Taken as 1 - accuracy, so the two always sum to exactly 1.
inline double error_rate(const ConfusionMatrix& c) { return 1.0 - accuracy(c); }

/// Mean over instances of (1/6) * sum_c |p_c - [c == truth]|.
inline double mae_classification(std::span<const ClassDistribution> predictions,
                                 std::span<const FertilityClass> truth) {
  if (predictions.size() != truth.size()) {
    throw Error(ErrorCode::LengthMismatch, "predictions and truth differ in length");
  }
  if (predictions.empty()) throw Error(ErrorCode::Empty, "no predictions");
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    double inst = 0.0;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const double target = c == index_of(truth[i]) ? 1.0 : 0.0;
      inst += std::abs(predictions[i].p[c] - target);
    }
    sum += inst / static_cast<double>(kNumClasses);
  }
  return sum / static_cast<double>(predictions.size());
}

/// One-vs-rest rates. A zero denominator yields 0 and sets the matching
/// `*_undefined` flag.
struct Rates {
  double tpr = 0.0;
  double fpr = 0.0;
  bool tpr_undefined = false;
  bool fpr_undefined = false;

  friend bool operator==(const Rates&, const Rates&) = default;
};

inline Rates tpr_fpr(const ConfusionMatrix& c, FertilityClass cls) {
  const std::size_t k = index_of(cls);
  std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
  for (std::size_t a = 0; a < kNumClasses; ++a) {
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      const std::size_t v = c.counts[a][p];
      if (a == k && p == k) tp += v;
      else if (a == k) fn += v;
      else if (p == k) fp += v;
      else tn += v;
    }
  }
  Rates r;
  if (tp + fn == 0) {
    r.tpr_undefined = true;
  } else {
    r.tpr = static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  if (fp + tn == 0) {
    r.fpr_undefined = true;
  } else {
    r.fpr = static_cast<double>(fp) / static_cast<double>(fp + tn);
  }
  return r;
}

/// Sample Pearson correlation, clamped into [-1, 1].
inline double correlation_coefficient(std::span<const double> pred, std::span<const double> actual) {
  if (pred.size() != actual.size()) throw Error(ErrorCode::LengthMismatch, "vectors differ in length");
  if (pred.size() < 2) throw Error(ErrorCode::LengthMismatch, "correlation needs at least 2 points");
  const double n = static_cast<double>(pred.size());
  double mp = 0.0, ma = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    mp += pred[i];
    ma += actual[i];
  }
  mp /= n;
  ma /= n;
  double spp = 0.0, saa = 0.0, spa = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double dp = pred[i] - mp;
    const double da = actual[i] - ma;
    spp += dp * dp;
    saa += da * da;
    spa += dp * da;
  }
  if (spp == 0.0 || saa == 0.0) throw Error(ErrorCode::ZeroVariance, "a vector is constant");
  return std::clamp(spa / std::sqrt(spp * saa), -1.0, 1.0);
}

/// Running numerator / denominator of the relative absolute error, so folds
/// with different baselines can be pooled by summation.
struct RaeAccumulator {
  double numerator = 0.0;
  double denominator = 0.0;

  void add(double pred, double actual, double baseline_mean) {
    numerator += std::abs(pred - actual);
    denominator += std::abs(actual - baseline_mean);
  }

  double percent() const {
    if (!(denominator > 0.0)) throw Error(ErrorCode::DegenerateBaseline, "baseline error is zero");
    return 100.0 * numerator / denominator;
  }
};

/// 100 * sum|pred - actual| / sum|actual - baseline_mean|.
inline double relative_absolute_error(std::span<const double> pred, std::span<const double> actual,
                                      double baseline_mean) {
  if (pred.size() != actual.size()) throw Error(ErrorCode::LengthMismatch, "vectors differ in length");
  RaeAccumulator acc;
  for (std::size_t i = 0; i < pred.size(); ++i) acc.add(pred[i], actual[i], baseline_mean);
  return acc.percent();
}

}  // namespace soilmine
