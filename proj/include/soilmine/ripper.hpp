#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "soilmine/attributes.hpp"
#include "soilmine/class_distribution.hpp"
#include "soilmine/dataset.hpp"
#include "soilmine/error.hpp"
#include "soilmine/rng.hpp"

namespace soilmine {

struct RipperParams {
  std::size_t folds = 3;          // 1/folds of the data is held out for pruning
  std::size_t optimizations = 2;  // optimization passes over each class's rules
  std::uint64_t seed = 1;
  double min_coverage = 2.0;      // a grown rule must cover at least this many instances

  friend bool operator==(const RipperParams&, const RipperParams&) = default;
};

/// `attribute <= value` when `less_equal`, otherwise `attribute >= value`.
struct Condition {
  Attribute attribute = Attribute::Ph;
  bool less_equal = true;
  double value = 0.0;

  bool covers(const SoilSample& s) const {
    return less_equal ? s[attribute] <= value : s[attribute] >= value;
  }

  friend bool operator==(const Condition&, const Condition&) = default;
};

struct Rule {
  std::vector<Condition> conditions;
  FertilityClass predicted = FertilityClass::VeryLow;
  ClassCounts coverage{};  // training instances that fire this rule in list order

  bool covers(const SoilSample& s) const {
    return std::all_of(conditions.begin(), conditions.end(),
                       [&](const Condition& c) { return c.covers(s); });
  }

  friend bool operator==(const Rule&, const Rule&) = default;
};

/// Ordered rule list; the first rule whose conditions all hold fires.
struct RuleList {
  std::vector<Rule> rules;
  FertilityClass default_class = FertilityClass::VeryLow;
  ClassCounts default_coverage{};

  friend bool operator==(const RuleList&, const RuleList&) = default;
};

/// Distribution for a rule (or the default) with training coverage `counts`:
/// the predicted class gets the Laplace precision (p + 1) / (cover + 2) and the
/// rest is shared among the other classes in proportion to count + 1.
inline ClassDistribution rule_distribution(FertilityClass predicted, const ClassCounts& counts) {
  double cover = 0.0;
  for (double c : counts) cover += c;
  const std::size_t target = index_of(predicted);
  const double confidence = (counts[target] + 1.0) / (cover + 2.0);
  double other_weight = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (c != target) other_weight += counts[c] + 1.0;
  }
  ClassDistribution d;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    d.p[c] = c == target ? confidence : (1.0 - confidence) * (counts[c] + 1.0) / other_weight;
  }
  return d;
}

inline ClassDistribution ripper_predict(const RuleList& r, const SoilSample& s) {
  for (const Rule& rule : r.rules) {
    if (rule.covers(s)) return rule_distribution(rule.predicted, rule.coverage);
  }
  return rule_distribution(r.default_class, r.default_coverage);
}

// ---------------------------------------------------------------------------
// Description length, in bits (RIPPER's encoding as used by JRip).

namespace mdl {

/// Bits to identify k elements of a t-element set when each is chosen with probability p.
inline double subset_dl(double t, double k, double p) {
  p = std::clamp(p, 1e-12, 1.0 - 1e-12);
  double bits = 0.0;
  if (k > 0.0) bits -= k * std::log2(p);
  if (t - k > 0.0) bits -= (t - k) * std::log2(1.0 - p);
  return bits;
}

/// Theory bits of a rule with k conditions chosen among `possible` ones, halved
/// to compensate for redundant conditions.
inline double theory_dl(std::size_t conditions, double possible) {
  if (conditions == 0) return 0.0;
  const double k = static_cast<double>(conditions);
  double kbits = std::log2(k);
  if (k > 1.0) kbits += 2.0 * std::log2(kbits);
  return 0.5 * (kbits + subset_dl(possible, k, std::min(k / possible, 1.0)));
}

/// Exception bits: false positives among the covered, false negatives among
/// the uncovered. `fp_share` is the expected fraction of errors that are false
/// positives.
inline double data_dl(double fp_share, double cover, double uncover, double fp, double fn) {
  const double total_bits = std::log2(cover + uncover + 1.0);
  double cover_bits = 0.0;
  double uncover_bits = 0.0;
  if (cover > uncover) {
    const double expected = fp_share * (fp + fn);
    cover_bits = subset_dl(cover, fp, expected / cover);
    uncover_bits = uncover > 0.0 ? subset_dl(uncover, fn, fn / uncover) : 0.0;
  } else {
    const double expected = (1.0 - fp_share) * (fp + fn);
    cover_bits = cover > 0.0 ? subset_dl(cover, fp, fp / cover) : 0.0;
    uncover_bits = subset_dl(uncover, fn, expected / uncover);
  }
  return total_bits + cover_bits + uncover_bits;
}

}  // namespace mdl

namespace detail {

// Learns the rules for one class against everything else in `data`.
class RipperClassLearner {
 public:
  using Rules = std::vector<std::vector<Condition>>;

  RipperClassLearner(const Dataset& d, FertilityClass target, const RipperParams& params,
                     double possible_conditions, SplitMix64& rng)
      : d_(d), labels_(*d.labels), target_(target), params_(params),
        possible_(possible_conditions), rng_(rng) {}

  Rules learn(const std::vector<std::size_t>& data) {
    double pos = 0.0;
    for (std::size_t i : data) pos += is_pos(i) ? 1.0 : 0.0;
    fp_share_ = data.empty() ? 0.5 : pos / static_cast<double>(data.size());

    Rules rules;
    build(rules, data);
    for (std::size_t pass = 0; pass < params_.optimizations; ++pass) {
      optimize(rules, data);
      build(rules, data);
    }
    return rules;
  }

 private:
  bool is_pos(std::size_t i) const { return labels_[i] == target_; }

  bool covers(const std::vector<Condition>& conds, std::size_t i) const {
    for (const auto& c : conds) {
      if (!c.covers(d_.rows[i])) return false;
    }
    return true;
  }

  bool covers_any(const Rules& rules, std::size_t i) const {
    for (const auto& r : rules) {
      if (covers(r, i)) return true;
    }
    return false;
  }

  double total_dl(const Rules& rules, const std::vector<std::size_t>& data) const {
    double bits = 0.0;
    for (const auto& r : rules) bits += mdl::theory_dl(r.size(), possible_);
    double cover = 0.0, fp = 0.0, fn = 0.0;
    for (std::size_t i : data) {
      const bool c = covers_any(rules, i);
      if (c) {
        cover += 1.0;
        if (!is_pos(i)) fp += 1.0;
      } else if (is_pos(i)) {
        fn += 1.0;
      }
    }
    const double uncover = static_cast<double>(data.size()) - cover;
    return bits + mdl::data_dl(fp_share_, cover, uncover, fp, fn);
  }

  // Stratified seeded split: 1/folds of the positives and of the negatives go to pruning.
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split(
      const std::vector<std::size_t>& data) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i : data) (is_pos(i) ? pos : neg).push_back(i);
    rng_.shuffle(std::span<std::size_t>(pos));
    rng_.shuffle(std::span<std::size_t>(neg));
    std::vector<std::size_t> grow, prune;
    for (auto* group : {&pos, &neg}) {
      const std::size_t n_prune = group->size() / params_.folds;
      prune.insert(prune.end(), group->begin(), group->begin() + static_cast<std::ptrdiff_t>(n_prune));
      grow.insert(grow.end(), group->begin() + static_cast<std::ptrdiff_t>(n_prune), group->end());
    }
    return {std::move(grow), std::move(prune)};
  }

  // Greedy FOIL-gain growth from `seed` until no negatives are covered or no
  // condition helps.
  std::vector<Condition> grow(const std::vector<std::size_t>& grow_set,
                              std::vector<Condition> rule) const {
    std::vector<std::size_t> covered;
    for (std::size_t i : grow_set) {
      if (covers(rule, i)) covered.push_back(i);
    }
    while (true) {
      double p0 = 0.0;
      for (std::size_t i : covered) p0 += is_pos(i) ? 1.0 : 0.0;
      const double n0 = static_cast<double>(covered.size()) - p0;
      if (n0 == 0.0 || p0 == 0.0) break;
      const double base = std::log2(p0 / (p0 + n0));

      std::optional<Condition> best;
      double best_gain = 0.0;
      std::vector<std::size_t> order = covered;
      for (Attribute a : kAllAttributes) {
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
          const double vx = d_.rows[x][a];
          const double vy = d_.rows[y][a];
          return vx < vy || (vx == vy && x < y);
        });
        double p_le = 0.0, n_le = 0.0;
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
          (is_pos(order[k]) ? p_le : n_le) += 1.0;
          const double lo = d_.rows[order[k]][a];
          const double hi = d_.rows[order[k + 1]][a];
          if (!(lo < hi)) continue;
          double mid = lo + (hi - lo) / 2.0;
          const std::array<std::pair<bool, std::pair<double, double>>, 2> sides{{
              {true, {p_le, n_le}},
              {false, {p0 - p_le, n0 - n_le}},
          }};
          for (const auto& [le, pn] : sides) {
            const auto [p, n] = pn;
            if (p < 1.0 || p + n < params_.min_coverage) continue;
            const double gain = p * (std::log2(p / (p + n)) - base);
            if (gain > best_gain + 1e-12) {
              best_gain = gain;
              double v = mid;
              if (le && !(v < hi)) v = lo;
              if (!le && !(v > lo)) v = hi;
              best = Condition{a, le, v};
            }
          }
        }
      }
      if (!best) break;
      rule.push_back(*best);
      std::erase_if(covered, [&](std::size_t i) { return !best->covers(d_.rows[i]); });
    }
    return rule;
  }

  // Incremental reduced-error pruning: keep the prefix maximizing (p - n) / (p + n)
  // on the pruning set; ties favour the shorter prefix, and a prefix covering
  // nothing is never preferred to one that covers something.
  std::vector<Condition> prune_irep(const std::vector<Condition>& rule,
                                    const std::vector<std::size_t>& prune_set) const {
    std::size_t best_len = rule.size();
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t len = 1; len <= rule.size(); ++len) {
      const std::vector<Condition> prefix(rule.begin(), rule.begin() + static_cast<std::ptrdiff_t>(len));
      double p = 0.0, n = 0.0;
      for (std::size_t i : prune_set) {
        if (covers(prefix, i)) (is_pos(i) ? p : n) += 1.0;
      }
      if (p + n == 0.0) continue;
      const double value = (p - n) / (p + n);
      if (value > best_value) {
        best_value = value;
        best_len = len;
      }
    }
    return {rule.begin(), rule.begin() + static_cast<std::ptrdiff_t>(best_len)};
  }

  // Pruning used while optimizing: keep the prefix of rules[at] that minimizes
  // the error of the whole rule set on the pruning data (ties: shorter).
  std::vector<Condition> prune_for_ruleset(Rules rules, std::size_t at,
                                           const std::vector<Condition>& candidate,
                                           const std::vector<std::size_t>& prune_set) const {
    std::size_t best_len = candidate.size();
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t len = 1; len <= candidate.size(); ++len) {
      rules[at].assign(candidate.begin(), candidate.begin() + static_cast<std::ptrdiff_t>(len));
      double err = 0.0;
      for (std::size_t i : prune_set) {
        if (covers_any(rules, i) != is_pos(i)) err += 1.0;
      }
      if (err < best_err) {
        best_err = err;
        best_len = len;
      }
    }
    return {candidate.begin(), candidate.begin() + static_cast<std::ptrdiff_t>(best_len)};
  }

  // Adds rules until the positives in `data` not yet covered run out, the MDL
  // stopping criterion fires, a rule covers no new positives, or at least half
  // of what it covers is negative. Finishes by deleting rules that lengthen the encoding.
  void build(Rules& rules, const std::vector<std::size_t>& data) {
    std::vector<std::size_t> uncovered;
    for (std::size_t i : data) {
      if (!covers_any(rules, i)) uncovered.push_back(i);
    }
    double min_dl = total_dl(rules, data);
    while (std::any_of(uncovered.begin(), uncovered.end(), [&](std::size_t i) { return is_pos(i); })) {
      auto [grow_set, prune_set] = split(uncovered);
      auto rule = grow(grow_set, {});
      if (rule.empty()) break;
      rule = prune_irep(rule, prune_set);

      // Stop statistics are taken over everything still uncovered, grow and prune parts alike.
      double p = 0.0, n = 0.0;
      for (std::size_t i : uncovered) {
        if (covers(rule, i)) (is_pos(i) ? p : n) += 1.0;
      }
      if (p == 0.0 || n / (p + n) >= 0.5) break;

      rules.push_back(rule);
      const double dl = total_dl(rules, data);
      if (dl > min_dl + kMaxDlSurplus) {
        rules.pop_back();
        break;
      }
      min_dl = std::min(min_dl, dl);
      std::erase_if(uncovered, [&](std::size_t i) { return covers(rule, i); });
    }
    reduce(rules, data);
  }

  void reduce(Rules& rules, const std::vector<std::size_t>& data) const {
    for (std::size_t k = rules.size(); k-- > 0;) {
      const double with = total_dl(rules, data);
      Rules without = rules;
      without.erase(without.begin() + static_cast<std::ptrdiff_t>(k));
      if (total_dl(without, data) < with) rules = std::move(without);
    }
  }

  // One optimization pass: each rule competes with a replacement grown from
  // scratch and a revision grown from the rule itself; the variant giving the
  // smallest total description length wins (the original on ties).
  void optimize(Rules& rules, const std::vector<std::size_t>& data) {
    for (std::size_t at = 0; at < rules.size(); ++at) {
      std::vector<std::size_t> local;
      for (std::size_t i : data) {
        bool earlier = false;
        for (std::size_t r = 0; r < at && !earlier; ++r) earlier = covers(rules[r], i);
        if (!earlier) local.push_back(i);
      }
      auto [grow_set, prune_set] = split(local);

      const std::vector<Condition> original = rules[at];
      std::vector<std::vector<Condition>> variants{original};
      auto replacement = grow(grow_set, {});
      if (!replacement.empty()) variants.push_back(prune_for_ruleset(rules, at, replacement, prune_set));
      auto revision = grow(grow_set, original);
      if (revision.size() > original.size()) {
        variants.push_back(prune_for_ruleset(rules, at, revision, prune_set));
      }

      double best_dl = std::numeric_limits<double>::infinity();
      std::size_t best = 0;
      for (std::size_t v = 0; v < variants.size(); ++v) {
        rules[at] = variants[v];
        const double dl = total_dl(rules, data);
        if (dl < best_dl - 1e-9) {
          best_dl = dl;
          best = v;
        }
      }
      rules[at] = variants[best];
    }
  }

  static constexpr double kMaxDlSurplus = 64.0;

  const Dataset& d_;
  const std::vector<FertilityClass>& labels_;
  FertilityClass target_;
  RipperParams params_;
  double possible_;
  SplitMix64& rng_;
  double fp_share_ = 0.5;
};

// Each numeric attribute offers (distinct values - 1) split points, each usable
// with <= or >=.
inline double possible_conditions(const Dataset& d) {
  double total = 0.0;
  for (Attribute a : kAllAttributes) {
    std::set<double> distinct;
    for (const auto& r : d.rows) distinct.insert(r[a]);
    total += 2.0 * static_cast<double>(distinct.size() - 1);
  }
  return std::max(total, 1.0);
}

}  // namespace detail

/// RIPPER-style ordered rule list. Classes are learned in ascending frequency
/// order (lower level first on ties); the most frequent class is the default.
/// Instances covered by one class's rules are removed before the next class.
/// Deterministic given `params.seed`, which drives every grow/prune shuffle.
inline RuleList train_ripper(const Dataset& d, const RipperParams& params = {}) {
  if (d.empty()) throw Error(ErrorCode::EmptyDataset, "RIPPER needs training data");
  if (!d.labels) throw Error(ErrorCode::UnlabeledDataset, "RIPPER needs labels");
  if (params.folds < 2) throw Error(ErrorCode::InvalidConfig, "folds must be >= 2");

  const auto& labels = *d.labels;
  std::array<std::size_t, kNumClasses> freq{};
  for (FertilityClass c : labels) ++freq[index_of(c)];
  std::vector<FertilityClass> order;
  for (FertilityClass c : kAllClasses) {
    if (freq[index_of(c)] > 0) order.push_back(c);
  }
  std::stable_sort(order.begin(), order.end(), [&](FertilityClass a, FertilityClass b) {
    return freq[index_of(a)] < freq[index_of(b)];
  });

  RuleList out;
  out.default_class = order.back();
  SplitMix64 rng(params.seed);
  const double possible = detail::possible_conditions(d);

  std::vector<std::size_t> remaining(d.size());
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    detail::RipperClassLearner learner(d, order[k], params, possible, rng);
    const auto rules = learner.learn(remaining);
    for (const auto& conds : rules) {
      Rule r;
      r.conditions = conds;
      r.predicted = order[k];
      out.rules.push_back(std::move(r));
    }
    std::erase_if(remaining, [&](std::size_t i) {
      return std::any_of(rules.begin(), rules.end(), [&](const auto& conds) {
        return std::all_of(conds.begin(), conds.end(),
                           [&](const Condition& c) { return c.covers(d.rows[i]); });
      });
    });
  }

  for (std::size_t i = 0; i < d.size(); ++i) {
    const std::size_t cls = index_of(labels[i]);
    bool fired = false;
    for (Rule& r : out.rules) {
      if (r.covers(d.rows[i])) {
        r.coverage[cls] += 1.0;
        fired = true;
        break;
      }
    }
    if (!fired) out.default_coverage[cls] += 1.0;
  }
  return out;
}

}  // namespace soilmine
