#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "soilmine/attributes.hpp"
#include "soilmine/dataset.hpp"
#include "soilmine/error.hpp"
#include "soilmine/rng.hpp"

namespace soilmine {

using Folds = std::vector<std::vector<std::size_t>>;

/// Stratified k-fold assignment. Classes are visited from VeryLow to
/// VeryHigh; each class's row indices are shuffled with one shared
/// SplitMix64(seed) stream and dealt round-robin, the deal position carrying
/// over from class to class. Fold sizes therefore differ by at most one and
/// every fold holds floor or ceil of its share of each class. Each fold is
/// returned sorted ascending.
inline Folds stratified_k_fold(const Dataset& d, std::size_t k, std::uint64_t seed) {
  if (!d.labels) throw Error(ErrorCode::UnlabeledDataset, "stratification needs labels");
  if (k < 2 || k > d.size()) {
    throw Error(ErrorCode::BadK, "k must satisfy 2 <= k <= N (N = " + std::to_string(d.size()) + ")");
  }
  SplitMix64 rng(seed);
  Folds folds(k);
  std::size_t deal = 0;
  for (FertilityClass c : kAllClasses) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if ((*d.labels)[i] == c) members.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t i : members) folds[deal++ % k].push_back(i);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

/// Unstratified variant for regression: one shuffle of 0..n-1, dealt round-robin.
inline Folds k_fold(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n) throw Error(ErrorCode::BadK, "k must satisfy 2 <= k <= N (N = " + std::to_string(n) + ")");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  Folds folds(k);
  for (std::size_t j = 0; j < n; ++j) folds[j % k].push_back(order[j]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

/// Every index not in `fold`, ascending; `fold` must be sorted.
inline std::vector<std::size_t> complement(std::size_t n, std::span<const std::size_t> fold) {
  std::vector<std::size_t> out;
  out.reserve(n - fold.size());
  std::size_t f = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (f < fold.size() && fold[f] == i) {
      ++f;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace soilmine
