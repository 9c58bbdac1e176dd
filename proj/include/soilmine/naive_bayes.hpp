#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>

#include "soilmine/attributes.hpp"
#include "soilmine/class_distribution.hpp"
#include "soilmine/dataset.hpp"
#include "soilmine/error.hpp"

namespace soilmine {

struct Gaussian {
  double mean = 0.0;
  double variance = 1.0;

  double log_density(double x) const {
    const double d = x - mean;
    return -0.5 * std::log(2.0 * std::numbers::pi * variance) - d * d / (2.0 * variance);
  }

  friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

/// Gaussian naive Bayes over the nine numeric attributes.
struct NaiveBayesModel {
  std::array<double, kNumClasses> priors{};
  std::array<std::array<Gaussian, kNumAttributes>, kNumClasses> likelihoods{};
  std::array<std::size_t, kNumClasses> class_counts{};

  friend bool operator==(const NaiveBayesModel&, const NaiveBayesModel&) = default;
};

inline constexpr double kVarianceFloorScale = 1e-9;

/// Priors are Laplace-smoothed, (n_c + 1) / (N + 6). Each per-class Gaussian
/// uses the sample mean and sample (n - 1) variance, floored at
/// 1e-9 * (global sample variance + 1e-12). A class seen once has variance 0
/// before flooring; a class never seen borrows the global mean and variance.
inline NaiveBayesModel train_naive_bayes(const Dataset& d) {
  if (d.empty()) throw Error(ErrorCode::EmptyDataset, "naive Bayes needs training data");
  if (!d.labels) throw Error(ErrorCode::UnlabeledDataset, "naive Bayes needs labels");

  NaiveBayesModel m;
  const auto& labels = *d.labels;
  for (FertilityClass c : labels) ++m.class_counts[index_of(c)];
  const double n = static_cast<double>(d.size());
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    m.priors[c] = (static_cast<double>(m.class_counts[c]) + 1.0) / (n + static_cast<double>(kNumClasses));
  }

  for (Attribute a : kAllAttributes) {
    const std::size_t j = index_of(a);
    double global_sum = 0.0;
    for (const auto& r : d.rows) global_sum += r[a];
    const double global_mean = global_sum / n;
    double global_ss = 0.0;
    for (const auto& r : d.rows) global_ss += (r[a] - global_mean) * (r[a] - global_mean);
    const double global_var = d.size() > 1 ? global_ss / (n - 1.0) : 0.0;
    const double floor = kVarianceFloorScale * (global_var + 1e-12);

    std::array<double, kNumClasses> sum{};
    for (std::size_t i = 0; i < d.size(); ++i) sum[index_of(labels[i])] += d.rows[i][a];
    std::array<double, kNumClasses> mean{};
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      mean[c] = m.class_counts[c] ? sum[c] / static_cast<double>(m.class_counts[c]) : global_mean;
    }
    std::array<double, kNumClasses> ss{};
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::size_t c = index_of(labels[i]);
      const double dev = d.rows[i][a] - mean[c];
      ss[c] += dev * dev;
    }
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const std::size_t nc = m.class_counts[c];
      double var = 0.0;
      if (nc == 0) {
        var = global_var;
      } else if (nc > 1) {
        var = ss[c] / static_cast<double>(nc - 1);
      }
      m.likelihoods[c][j] = Gaussian{mean[c], std::max(var, floor)};
    }
  }
  return m;
}

/// Posterior over classes, accumulated in log space and normalized with the
/// log-sum-exp shift.
inline ClassDistribution nb_predict(const NaiveBayesModel& m, const SoilSample& s) {
  std::array<double, kNumClasses> log_post{};
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    double lp = std::log(m.priors[c]);
    for (std::size_t j = 0; j < kNumAttributes; ++j) lp += m.likelihoods[c][j].log_density(s.values[j]);
    log_post[c] = lp;
    best = std::max(best, lp);
  }
  ClassDistribution out;
  double total = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    out.p[c] = std::exp(log_post[c] - best);
    total += out.p[c];
  }
  for (double& v : out.p) v /= total;
  return out;
}

}  // namespace soilmine
