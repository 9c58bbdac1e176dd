#pragma once

#include <array>
#include <cstddef>

#include "soilmine/attributes.hpp"

namespace soilmine {

using ClassCounts = std::array<double, kNumClasses>;

/// Probability over the six fertility classes.
struct ClassDistribution {
  std::array<double, kNumClasses> p{};

  double operator[](FertilityClass c) const { return p[index_of(c)]; }

  /// Most probable class; ties go to the lower level.
  FertilityClass argmax() const {
    std::size_t best = 0;
    for (std::size_t c = 1; c < kNumClasses; ++c) {
      if (p[c] > p[best]) best = c;
    }
    return class_at(best);
  }

  double sum() const {
    double s = 0.0;
    for (double v : p) s += v;
    return s;
  }

  static ClassDistribution one_hot(FertilityClass c) {
    ClassDistribution d;
    d.p[index_of(c)] = 1.0;
    return d;
  }

  /// (count_c + 1) / (total + 6).
  static ClassDistribution laplace(const ClassCounts& counts) {
    double total = 0.0;
    for (double c : counts) total += c;
    ClassDistribution d;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      d.p[c] = (counts[c] + 1.0) / (total + static_cast<double>(kNumClasses));
    }
    return d;
  }

  friend bool operator==(const ClassDistribution&, const ClassDistribution&) = default;
};

}  // namespace soilmine
