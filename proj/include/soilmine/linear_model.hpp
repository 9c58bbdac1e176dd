#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "soilmine/attributes.hpp"
#include "soilmine/dataset.hpp"

namespace soilmine {

struct FitMeta {
  std::string algorithm;     // "ols", "lms", "simple", ...
  double build_time_s = 0.0;  // wall clock, millisecond resolution
  double objective = 0.0;    // RSS for ols/simple, median squared residual for lms

  friend bool operator==(const FitMeta&, const FitMeta&) = default;
};

/// prediction = intercept + sum_j coefficients[j] * sample[retained[j]]
struct LinearModel {
  Attribute target = Attribute::P;
  std::vector<Attribute> retained;
  std::vector<double> coefficients;
  double intercept = 0.0;
  FitMeta meta;

  /// Coefficient of `a`, or 0 when the attribute was not retained.
  double coefficient(Attribute a) const {
    for (std::size_t j = 0; j < retained.size(); ++j) {
      if (retained[j] == a) return coefficients[j];
    }
    return 0.0;
  }

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

inline double predict_value(const LinearModel& m, const SoilSample& s) {
  double y = m.intercept;
  for (std::size_t j = 0; j < m.retained.size(); ++j) y += m.coefficients[j] * s[m.retained[j]];
  return y;
}

}  // namespace soilmine
