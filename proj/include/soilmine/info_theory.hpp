#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "soilmine/attributes.hpp"
#include "soilmine/class_distribution.hpp"
#include "soilmine/dataset.hpp"
#include "soilmine/error.hpp"

namespace soilmine {

/// Shannon entropy in bits, -sum p log2 p; zero counts contribute nothing.
inline double entropy(std::span<const double> counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  if (!(total > 0.0)) throw Error(ErrorCode::AllZero, "entropy of an all-zero count vector");
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) {
      const double p = c / total;
      h -= p * std::log2(p);
    }
  }
  return h > 0.0 ? h : 0.0;
}

inline double entropy(std::span<const std::size_t> counts) {
  double total = 0.0;
  double h = 0.0;
  for (std::size_t c : counts) total += static_cast<double>(c);
  if (!(total > 0.0)) throw Error(ErrorCode::AllZero, "entropy of an all-zero count vector");
  for (std::size_t c : counts) {
    if (c > 0) {
      const double p = static_cast<double>(c) / total;
      h -= p * std::log2(p);
    }
  }
  return h > 0.0 ? h : 0.0;
}

struct SplitScore {
  double info_gain = 0.0;
  double split_info = 0.0;
  double gain_ratio = 0.0;
};

/// Score of the binary split `left = {count vector}` vs `right`, both non-empty.
inline SplitScore score_split(const ClassCounts& left, const ClassCounts& right) {
  ClassCounts parent{};
  double n_left = 0.0;
  double n_right = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    parent[c] = left[c] + right[c];
    n_left += left[c];
    n_right += right[c];
  }
  if (!(n_left > 0.0) || !(n_right > 0.0)) {
    throw Error(ErrorCode::DegenerateSplit, "one side of the split is empty");
  }
  const double n = n_left + n_right;
  SplitScore s;
  s.info_gain = entropy(std::span<const double>(parent)) -
                (n_left / n) * entropy(std::span<const double>(left)) -
                (n_right / n) * entropy(std::span<const double>(right));
  const std::array<double, 2> sizes{n_left, n_right};
  s.split_info = entropy(std::span<const double>(sizes));
  s.gain_ratio = s.info_gain / s.split_info;
  return s;
}

/// Information gain, split information and gain ratio of `attribute <= threshold`.
inline SplitScore gain_ratio(const Dataset& d, Attribute attribute, double threshold) {
  if (!d.labels) throw Error(ErrorCode::UnlabeledDataset, "gain ratio needs labels");
  ClassCounts left{};
  ClassCounts right{};
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto& side = d.rows[i][attribute] <= threshold ? left : right;
    side[index_of((*d.labels)[i])] += 1.0;
  }
  return score_split(left, right);
}

}  // namespace soilmine
