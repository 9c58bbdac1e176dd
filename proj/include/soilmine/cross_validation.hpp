#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "soilmine/attributes.hpp"
#include "soilmine/class_distribution.hpp"
#include "soilmine/dataset.hpp"
#include "soilmine/error.hpp"
#include "soilmine/folds.hpp"
#include "soilmine/metrics.hpp"
#include "soilmine/models.hpp"

namespace soilmine {

struct CvOptions {
  std::size_t k = 10;
  std::uint64_t seed = 42;
  std::size_t jobs = 1;  // worker threads for fold evaluation; 0 = hardware concurrency
};

struct EvaluationReport {
  std::string algorithm;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  double accuracy = 0.0;
  double error_rate = 0.0;
  double mae = 0.0;
  std::array<Rates, kNumClasses> per_class{};
  double weighted_tpr = 0.0;
  double weighted_fpr = 0.0;
  ConfusionMatrix confusion;
  double build_time_s = 0.0;  // mean per-fold training wall time

  std::size_t total() const { return correct + incorrect; }

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

struct RegressionReport {
  std::string algorithm;
  Attribute target = Attribute::P;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  double correlation = 0.0;
  bool correlation_undefined = false;  // constant predictions or targets; correlation reported as 0
  double rae_percent = 0.0;
  double build_time_s = 0.0;  // one fit on the full dataset

  friend bool operator==(const RegressionReport&, const RegressionReport&) = default;
};

/// Out-of-fold predictions in row order, next to the report they produced.
struct RegressionRun {
  RegressionReport report;
  std::vector<double> actual;
  std::vector<double> predicted;
  LinearModel full_model;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline double round_ms(double seconds) { return std::round(seconds * 1000.0) / 1000.0; }

/// Runs task(f) for every fold index, on up to `jobs` threads. Failures are
/// rethrown after all workers finish, lowest fold first, annotated with it.
inline void for_each_fold(std::size_t folds, std::size_t jobs,
                          const std::function<void(std::size_t)>& task) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, folds);
  std::vector<std::exception_ptr> errors(folds);
  auto run = [&](std::size_t f) {
    try {
      task(f);
    } catch (...) {
      errors[f] = std::current_exception();
    }
  };
  if (jobs <= 1) {
    for (std::size_t f = 0; f < folds; ++f) run(f);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t f = next++; f < folds; f = next++) run(f);
      });
    }
    for (auto& t : workers) t.join();
  }
  for (std::size_t f = 0; f < folds; ++f) {
    if (!errors[f]) continue;
    try {
      std::rethrow_exception(errors[f]);
    } catch (const Error& e) {
      throw e.in_fold(f);
    }
  }
}

}  // namespace detail

/// Stratified k-fold evaluation of one classifier. Metrics are reduced in row
/// order after all folds finish, so the report does not depend on `jobs`.
inline EvaluationReport cross_validate_classifier(const ClassifierSpec& spec, const Dataset& d,
                                                  const CvOptions& opts = {}) {
  const Folds folds = stratified_k_fold(d, opts.k, opts.seed);
  std::vector<ClassDistribution> predictions(d.size());
  std::vector<double> train_seconds(folds.size());

  detail::for_each_fold(folds.size(), opts.jobs, [&](std::size_t f) {
    const auto train_idx = complement(d.size(), folds[f]);
    const Dataset train = subset(d, train_idx);
    const auto start = std::chrono::steady_clock::now();
    const ClassifierModel model = train_classifier(spec, train);
    train_seconds[f] = detail::seconds_since(start);
    for (std::size_t i : folds[f]) predictions[i] = predict_distribution(model, d.rows[i]);
  });

  EvaluationReport r;
  r.algorithm = spec.tag();
  r.k = opts.k;
  r.seed = opts.seed;
  const auto& truth = *d.labels;
  for (std::size_t i = 0; i < d.size(); ++i) r.confusion.add(truth[i], predictions[i].argmax());
  r.correct = r.confusion.trace();
  r.incorrect = r.confusion.total() - r.correct;
  r.accuracy = accuracy(r.confusion);
  r.error_rate = error_rate(r.confusion);
  r.mae = mae_classification(predictions, truth);
  const double total = static_cast<double>(r.confusion.total());
  for (FertilityClass c : kAllClasses) {
    const Rates rates = tpr_fpr(r.confusion, c);
    r.per_class[index_of(c)] = rates;
    const double weight = static_cast<double>(r.confusion.actual_count(c)) / total;
    r.weighted_tpr += weight * rates.tpr;
    r.weighted_fpr += weight * rates.fpr;
  }
  double sum_time = 0.0;
  for (double t : train_seconds) sum_time += t;
  r.build_time_s = detail::round_ms(sum_time / static_cast<double>(folds.size()));
  return r;
}

/// k-fold evaluation of one regressor on `target`. Out-of-fold predictions
/// are pooled; RAE uses each fold's training-split mean as its baseline, with
/// numerators and denominators summed across folds. build_time_s times one
/// extra fit on the whole dataset.
inline RegressionRun cross_validate_regressor(const RegressorSpec& spec, const Dataset& d,
                                              Attribute target, const CvOptions& opts = {}) {
  const Folds folds = k_fold(d.size(), opts.k, opts.seed);
  RegressionRun run;
  run.actual = d.column(target);
  run.predicted.assign(d.size(), 0.0);
  std::vector<double> baseline(folds.size());

  detail::for_each_fold(folds.size(), opts.jobs, [&](std::size_t f) {
    const auto train_idx = complement(d.size(), folds[f]);
    const Dataset train = subset(d, train_idx);
    const LinearModel model = fit_regressor(spec, train, target);
    double sum = 0.0;
    for (const auto& r : train.rows) sum += r[target];
    baseline[f] = sum / static_cast<double>(train.size());
    for (std::size_t i : folds[f]) run.predicted[i] = predict_value(model, d.rows[i]);
  });

  RaeAccumulator rae;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    for (std::size_t i : folds[f]) rae.add(run.predicted[i], run.actual[i], baseline[f]);
  }
  const auto start = std::chrono::steady_clock::now();
  run.full_model = fit_regressor(spec, d, target);
  const double full_seconds = detail::seconds_since(start);

  RegressionReport& r = run.report;
  r.algorithm = spec.tag();
  r.target = target;
  r.k = opts.k;
  r.seed = opts.seed;
  try {
    r.correlation = correlation_coefficient(run.predicted, run.actual);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroVariance) throw;
    r.correlation = 0.0;
    r.correlation_undefined = true;
  }
  r.rae_percent = rae.percent();
  r.build_time_s = detail::round_ms(full_seconds);
  return run;
}

}  // namespace soilmine
