#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "soilmine/attributes.hpp"
#include "soilmine/class_distribution.hpp"
#include "soilmine/dataset.hpp"
#include "soilmine/error.hpp"
#include "soilmine/info_theory.hpp"

namespace soilmine {

struct C45Params {
  std::size_t min_leaf = 2;
  double prune_confidence = 0.25;
  bool pruning = true;

  friend bool operator==(const C45Params&, const C45Params&) = default;
};

/// Flat binary tree; node 0 is the root. Internal nodes send `value <= threshold`
/// to `left`. Every node keeps its training class counts so a pruned subtree
/// can be collapsed in place.
struct TreeNode {
  bool leaf = true;
  Attribute attribute = Attribute::Ph;
  double threshold = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  ClassCounts counts{};
  FertilityClass majority = FertilityClass::VeryLow;
  double count = 0.0;
  double error_estimate = 0.0;  // pessimistic expected errors at this node as a leaf

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  std::size_t node_count() const { return nodes.size(); }

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.leaf; }));
  }

  std::size_t depth(std::size_t at = 0) const {
    const TreeNode& n = nodes[at];
    return n.leaf ? 0 : 1 + std::max(depth(n.left), depth(n.right));
  }

  /// Sum of the leaves' pessimistic error estimates.
  double pessimistic_errors(std::size_t at = 0) const {
    const TreeNode& n = nodes[at];
    return n.leaf ? n.error_estimate : pessimistic_errors(n.left) + pessimistic_errors(n.right);
  }

  const TreeNode& leaf_for(const SoilSample& s) const {
    std::size_t at = 0;
    while (!nodes[at].leaf) {
      const TreeNode& n = nodes[at];
      at = s[n.attribute] <= n.threshold ? n.left : n.right;
    }
    return nodes[at];
  }

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

/// Upper limit of the one-sided binomial confidence interval for the error
/// rate after observing `errors` mistakes in `n` trials: the p with
/// P(X <= errors | n, p) = confidence. Solved by bisection on the exact CDF.
inline double binomial_upper_bound(double errors, double n, double confidence) {
  if (n <= 0.0) return 0.0;
  const auto e = static_cast<long>(std::llround(errors));
  const auto trials = static_cast<long>(std::llround(n));
  if (e >= trials) return 1.0;
  std::vector<double> log_choose(static_cast<std::size_t>(e) + 1);
  for (long k = 1; k <= e; ++k) {
    log_choose[static_cast<std::size_t>(k)] = log_choose[static_cast<std::size_t>(k - 1)] +
                                              std::log(static_cast<double>(trials - k + 1)) -
                                              std::log(static_cast<double>(k));
  }
  auto cdf = [&](double p) {
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    double sum = 0.0;
    for (long k = 0; k <= e; ++k) {
      const double kd = static_cast<double>(k);
      sum += std::exp(log_choose[static_cast<std::size_t>(k)] + kd * lp +
                      static_cast<double>(trials - k) * lq);
    }
    return sum;
  };
  double lo = static_cast<double>(e) / static_cast<double>(trials);
  double hi = 1.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) > confidence) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace detail {

inline FertilityClass majority_of(const ClassCounts& counts) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return class_at(best);
}

struct CandidateSplit {
  Attribute attribute = Attribute::Ph;
  double threshold = 0.0;
  SplitScore score;
};

class C45Builder {
 public:
  C45Builder(const Dataset& d, const C45Params& params) : d_(d), labels_(*d.labels), params_(params) {}

  DecisionTree build() {
    std::vector<std::size_t> all(d_.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    grow(all);
    return std::move(tree_);
  }

 private:
  std::size_t grow(std::vector<std::size_t>& idx) {
    const std::size_t at = tree_.nodes.size();
    tree_.nodes.emplace_back();
    TreeNode node;
    for (std::size_t i : idx) node.counts[index_of(labels_[i])] += 1.0;
    node.count = static_cast<double>(idx.size());
    node.majority = majority_of(node.counts);
    const double errors = node.count - node.counts[index_of(node.majority)];
    node.error_estimate = node.count * binomial_upper_bound(errors, node.count, params_.prune_confidence);

    const bool pure = errors == 0.0;
    const bool too_small = idx.size() < 2 * params_.min_leaf;
    if (!pure && !too_small) {
      if (auto split = best_split(idx, node.counts)) {
        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (std::size_t i : idx) {
          (d_.rows[i][split->attribute] <= split->threshold ? left : right).push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();
        node.leaf = false;
        node.attribute = split->attribute;
        node.threshold = split->threshold;
        tree_.nodes[at] = node;
        const std::size_t l = grow(left);
        const std::size_t r = grow(right);
        tree_.nodes[at].left = l;
        tree_.nodes[at].right = r;
        return at;
      }
    }
    tree_.nodes[at] = node;
    return at;
  }

  // Per attribute, the threshold with the highest information gain (first wins
  // on ties); then, among attributes whose gain is at least the average
  // positive gain, the highest gain ratio (lowest attribute index on ties).
  std::optional<CandidateSplit> best_split(const std::vector<std::size_t>& idx,
                                           const ClassCounts& parent) const {
    const double n = static_cast<double>(idx.size());
    const double parent_entropy = entropy(std::span<const double>(parent));
    std::vector<CandidateSplit> per_attribute;
    std::vector<std::size_t> order(idx);
    for (Attribute a : kAllAttributes) {
      std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const double vx = d_.rows[x][a];
        const double vy = d_.rows[y][a];
        return vx < vy || (vx == vy && x < y);
      });
      ClassCounts left{};
      ClassCounts right = parent;
      std::optional<CandidateSplit> best;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        const std::size_t c = index_of(labels_[order[k]]);
        left[c] += 1.0;
        right[c] -= 1.0;
        const double lo = d_.rows[order[k]][a];
        const double hi = d_.rows[order[k + 1]][a];
        if (!(lo < hi)) continue;
        const std::size_t n_left = k + 1;
        const std::size_t n_right = order.size() - n_left;
        if (n_left < params_.min_leaf || n_right < params_.min_leaf) continue;
        const double nl = static_cast<double>(n_left);
        const double nr = static_cast<double>(n_right);
        const double gain = parent_entropy - (nl / n) * entropy(std::span<const double>(left)) -
                            (nr / n) * entropy(std::span<const double>(right));
        if (!best || gain > best->score.info_gain) {
          double t = lo + (hi - lo) / 2.0;
          if (!(t < hi)) t = lo;
          const std::array<double, 2> sizes{nl, nr};
          const double split_info = entropy(std::span<const double>(sizes));
          best = CandidateSplit{a, t, SplitScore{gain, split_info, gain / split_info}};
        }
      }
      if (best && best->score.info_gain > kMinGain) per_attribute.push_back(*best);
    }
    if (per_attribute.empty()) return std::nullopt;
    double avg_gain = 0.0;
    for (const auto& c : per_attribute) avg_gain += c.score.info_gain;
    avg_gain /= static_cast<double>(per_attribute.size());
    std::optional<CandidateSplit> chosen;
    for (const auto& c : per_attribute) {
      if (c.score.info_gain < avg_gain - 1e-12) continue;
      if (!chosen || c.score.gain_ratio > chosen->score.gain_ratio) chosen = c;
    }
    return chosen;
  }

  static constexpr double kMinGain = 1e-12;

  const Dataset& d_;
  const std::vector<FertilityClass>& labels_;
  C45Params params_;
  DecisionTree tree_;
};

// Returns the pessimistic error of the (possibly collapsed) subtree at `at`.
inline double prune_subtree(DecisionTree& t, std::size_t at) {
  TreeNode& n = t.nodes[at];
  if (n.leaf) return n.error_estimate;
  const std::size_t l = n.left;
  const std::size_t r = n.right;
  const double subtree = prune_subtree(t, l) + prune_subtree(t, r);
  TreeNode& node = t.nodes[at];
  if (node.error_estimate <= subtree) {
    node.leaf = true;
    node.left = node.right = 0;
    node.attribute = Attribute::Ph;
    node.threshold = 0.0;
    return node.error_estimate;
  }
  return subtree;
}

// Drops nodes orphaned by pruning, renumbering in pre-order.
inline DecisionTree compact(const DecisionTree& t) {
  DecisionTree out;
  auto copy = [&](auto&& self, std::size_t at) -> std::size_t {
    const std::size_t here = out.nodes.size();
    out.nodes.push_back(t.nodes[at]);
    if (!t.nodes[at].leaf) {
      const std::size_t l = self(self, t.nodes[at].left);
      const std::size_t r = self(self, t.nodes[at].right);
      out.nodes[here].left = l;
      out.nodes[here].right = r;
    }
    return here;
  };
  copy(copy, 0);
  return out;
}

}  // namespace detail

/// Grows a binary C4.5-style tree and, when enabled, prunes it by subtree
/// replacement: a subtree collapses to a leaf whenever the leaf's pessimistic
/// error (count times the binomial upper bound at `prune_confidence`) is no
/// worse than the sum over the subtree's leaves. Subtree raising is not done.
inline DecisionTree train_c45(const Dataset& d, const C45Params& params = {}) {
  if (d.empty()) throw Error(ErrorCode::EmptyDataset, "C4.5 needs training data");
  if (!d.labels) throw Error(ErrorCode::UnlabeledDataset, "C4.5 needs labels");
  if (params.min_leaf < 1 || !(params.prune_confidence > 0.0 && params.prune_confidence < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "min_leaf >= 1 and 0 < prune_confidence < 1 required");
  }
  DecisionTree tree = detail::C45Builder(d, params).build();
  if (params.pruning) {
    detail::prune_subtree(tree, 0);
    tree = detail::compact(tree);
  }
  return tree;
}

/// Laplace-smoothed training distribution of the leaf the sample reaches.
inline ClassDistribution c45_predict(const DecisionTree& t, const SoilSample& s) {
  return ClassDistribution::laplace(t.leaf_for(s).counts);
}

}  // namespace soilmine
