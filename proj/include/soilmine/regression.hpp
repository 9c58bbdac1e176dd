#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "soilmine/attributes.hpp"
#include "soilmine/dataset.hpp"
#include "soilmine/error.hpp"
#include "soilmine/linear_model.hpp"
#include "soilmine/rng.hpp"
#include "soilmine/synth.hpp"

namespace soilmine {

inline constexpr double kRidgeLambda = 1e-8;

/// Least-squares solution of X b ~ y by column-pivoted Householder QR. When X
/// is rank deficient the system is re-solved with a ridge penalty
/// kRidgeLambda on every column except the first (the intercept column).
inline Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() == x.cols()) return qr.solve(y);
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + p - 1, p);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + p - 1);
  aug.topRows(n) = x;
  rhs.head(n) = y;
  const double s = std::sqrt(kRidgeLambda);
  for (Eigen::Index j = 1; j < p; ++j) aug(n + j - 1, j) = s;
  return Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(aug).solve(rhs);
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double elapsed_ms_resolution(Clock::time_point start) {
  const auto us = std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start).count();
  return std::round(static_cast<double>(us) / 1000.0) / 1000.0;
}

inline std::vector<Attribute> resolve_candidates(Attribute target, std::span<const Attribute> candidates) {
  std::vector<Attribute> out;
  if (candidates.empty()) {
    for (Attribute a : predictors_of(target)) out.push_back(a);
    return out;
  }
  std::array<bool, kNumAttributes> seen{};
  for (Attribute a : candidates) {
    if (a == target) throw Error(ErrorCode::InvalidConfig, "target cannot be a predictor", std::nullopt, std::string(name_of(a)));
    if (!seen[index_of(a)]) out.push_back(a);
    seen[index_of(a)] = true;
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline Eigen::VectorXd target_vector(const Dataset& d, Attribute target) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double v = d.rows[i][target];
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteTarget, "target is not finite", i + 1, std::string(name_of(target)));
    }
    y(static_cast<Eigen::Index>(i)) = v;
  }
  return y;
}

/// Intercept column followed by one column per attribute.
inline Eigen::MatrixXd design_matrix(const Dataset& d, std::span<const Attribute> attrs) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(attrs.size() + 1));
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    x(r, 0) = 1.0;
    for (std::size_t j = 0; j < attrs.size(); ++j) x(r, static_cast<Eigen::Index>(j + 1)) = d.rows[i][attrs[j]];
  }
  return x;
}

inline Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x, const std::vector<std::size_t>& attr_cols) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(attr_cols.size() + 1));
  out.col(0) = x.col(0);
  for (std::size_t j = 0; j < attr_cols.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j + 1)) = x.col(static_cast<Eigen::Index>(attr_cols[j] + 1));
  }
  return out;
}

struct SubsetFit {
  Eigen::VectorXd beta;
  double rss = 0.0;
};

inline SubsetFit fit_columns(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const std::vector<std::size_t>& attr_cols) {
  const Eigen::MatrixXd xs = select_columns(x, attr_cols);
  SubsetFit f;
  f.beta = solve_least_squares(xs, y);
  f.rss = (y - xs * f.beta).squaredNorm();
  return f;
}

// Akaike criterion for a Gaussian linear model with `params` coefficients.
inline double aic(double rss, std::size_t n, std::size_t params) {
  const double nd = static_cast<double>(n);
  const double sigma2 = std::max(rss / nd, std::numeric_limits<double>::min());
  return nd * std::log(sigma2) + 2.0 * static_cast<double>(params);
}

inline LinearModel make_model(Attribute target, const std::vector<Attribute>& attrs,
                              const Eigen::VectorXd& beta, std::string algorithm) {
  LinearModel m;
  m.target = target;
  m.retained = attrs;
  m.intercept = beta(0);
  for (std::size_t j = 0; j < attrs.size(); ++j) m.coefficients.push_back(beta(static_cast<Eigen::Index>(j + 1)));
  m.meta.algorithm = std::move(algorithm);
  return m;
}

inline double median_in_place(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

// C(n, k), saturating at `cap + 1`.
inline std::uint64_t choose_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  double acc = 1.0;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * static_cast<double>(n - k + i) / static_cast<double>(i);
    if (acc > static_cast<double>(cap)) return cap + 1;
  }
  return static_cast<std::uint64_t>(std::llround(acc));
}

}  // namespace detail

/// Ordinary least squares of `target` on `candidates` (default: the other
/// eight attributes). With `select`, attributes are removed greedily, one at a
/// time, while removal lowers AIC = n ln(RSS/n) + 2 (params); the removal with
/// the lowest AIC is taken, the earliest attribute on ties.
inline LinearModel fit_ols(const Dataset& d, Attribute target, bool select = true,
                           std::span<const Attribute> candidates = {}) {
  const auto start = detail::Clock::now();
  const auto attrs = detail::resolve_candidates(target, candidates);
  if (d.size() < attrs.size() + 1) {
    throw Error(ErrorCode::TooFewRows, "OLS needs at least p + 1 rows");
  }
  const Eigen::VectorXd y = detail::target_vector(d, target);
  const Eigen::MatrixXd x = detail::design_matrix(d, attrs);

  std::vector<std::size_t> kept(attrs.size());
  for (std::size_t j = 0; j < kept.size(); ++j) kept[j] = j;
  auto fit = detail::fit_columns(x, y, kept);
  if (select) {
    double current = detail::aic(fit.rss, d.size(), kept.size() + 1);
    while (!kept.empty()) {
      std::optional<std::size_t> drop;
      detail::SubsetFit best_fit;
      double best_aic = current;
      for (std::size_t k = 0; k < kept.size(); ++k) {
        std::vector<std::size_t> trial = kept;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(k));
        auto f = detail::fit_columns(x, y, trial);
        const double a = detail::aic(f.rss, d.size(), trial.size() + 1);
        if (a < best_aic) {
          best_aic = a;
          drop = k;
          best_fit = std::move(f);
        }
      }
      if (!drop) break;
      kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(*drop));
      fit = std::move(best_fit);
      current = best_aic;
    }
  }
  std::vector<Attribute> retained;
  for (std::size_t j : kept) retained.push_back(attrs[j]);
  auto m = detail::make_model(target, retained, fit.beta, "ols");
  m.meta.objective = fit.rss;
  m.meta.build_time_s = detail::elapsed_ms_resolution(start);
  return m;
}

struct LmsConfig {
  std::size_t subsample_count = 1000;
  std::uint64_t seed = 42;
  std::uint64_t exhaustive_below = 5000;

  friend bool operator==(const LmsConfig&, const LmsConfig&) = default;
};

/// Least median of squares by elemental subsets: every subset of p + 1 rows
/// defines an exact (least-squares, for singular subsets) fit, and the fit with
/// the smallest median squared residual over all rows wins; the earliest
/// subset wins ties. All C(n, p + 1) subsets are tried in lexicographic order
/// when that count is at most `exhaustive_below`; otherwise `subsample_count`
/// subsets are drawn from SplitMix64(seed), each by rejection sampling of
/// distinct row indices. No reweighting step follows.
inline LinearModel fit_lms(const Dataset& d, Attribute target, const LmsConfig& cfg = {},
                           std::span<const Attribute> candidates = {}) {
  const auto start = detail::Clock::now();
  if (cfg.subsample_count < 1) throw Error(ErrorCode::InvalidConfig, "subsample_count must be >= 1");
  const auto attrs = detail::resolve_candidates(target, candidates);
  const std::size_t n = d.size();
  const std::size_t m = attrs.size() + 1;
  if (n < attrs.size() + 2) throw Error(ErrorCode::TooFewRows, "LMS needs at least p + 2 rows");

  const Eigen::VectorXd y = detail::target_vector(d, target);
  const Eigen::MatrixXd x = detail::design_matrix(d, attrs);

  Eigen::VectorXd best_beta;
  double best_median = std::numeric_limits<double>::infinity();
  std::vector<double> sq(n);
  Eigen::MatrixXd xs(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  Eigen::VectorXd ys(static_cast<Eigen::Index>(m));

  auto evaluate = [&](const std::vector<std::size_t>& rows) {
    for (std::size_t r = 0; r < m; ++r) {
      xs.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(rows[r]));
      ys(static_cast<Eigen::Index>(r)) = y(static_cast<Eigen::Index>(rows[r]));
    }
    const Eigen::VectorXd beta = solve_least_squares(xs, ys);
    const Eigen::VectorXd resid = y - x * beta;
    for (std::size_t i = 0; i < n; ++i) sq[i] = resid(static_cast<Eigen::Index>(i)) * resid(static_cast<Eigen::Index>(i));
    const double med = detail::median_in_place(sq);
    if (med < best_median) {
      best_median = med;
      best_beta = beta;
    }
  };

  std::vector<std::size_t> rows(m);
  if (detail::choose_capped(n, m, cfg.exhaustive_below) <= cfg.exhaustive_below) {
    for (std::size_t r = 0; r < m; ++r) rows[r] = r;
    while (true) {
      evaluate(rows);
      std::size_t k = m;
      while (k > 0 && rows[k - 1] == n - m + (k - 1)) --k;
      if (k == 0) break;
      ++rows[k - 1];
      for (std::size_t r = k; r < m; ++r) rows[r] = rows[r - 1] + 1;
    }
  } else {
    SplitMix64 rng(cfg.seed);
    for (std::size_t s = 0; s < cfg.subsample_count; ++s) {
      for (std::size_t r = 0; r < m; ++r) {
        std::size_t pick;
        do {
          pick = static_cast<std::size_t>(rng.below(n));
        } while (std::find(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(r), pick) !=
                 rows.begin() + static_cast<std::ptrdiff_t>(r));
        rows[r] = pick;
      }
      evaluate(rows);
    }
  }

  auto model = detail::make_model(target, attrs, best_beta, "lms");
  model.meta.objective = best_median;
  model.meta.build_time_s = detail::elapsed_ms_resolution(start);
  return model;
}

/// Best single-attribute least-squares line: the candidate with the smallest
/// RSS wins, the earliest in canonical order on (near-)ties.
inline LinearModel fit_simple(const Dataset& d, Attribute target, std::span<const Attribute> candidates = {}) {
  const auto start = detail::Clock::now();
  const auto attrs = detail::resolve_candidates(target, candidates);
  if (d.size() < 2) throw Error(ErrorCode::TooFewRows, "simple regression needs at least 2 rows");
  const Eigen::VectorXd y = detail::target_vector(d, target);
  const double n = static_cast<double>(d.size());
  const double y_mean = y.mean();

  std::optional<LinearModel> best;
  for (Attribute a : attrs) {
    double x_mean = 0.0;
    for (const auto& r : d.rows) x_mean += r[a];
    x_mean /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double dx = d.rows[i][a] - x_mean;
      sxx += dx * dx;
      sxy += dx * (y(static_cast<Eigen::Index>(i)) - y_mean);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    const double intercept = y_mean - slope * x_mean;
    double rss = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double r = y(static_cast<Eigen::Index>(i)) - (intercept + slope * d.rows[i][a]);
      rss += r * r;
    }
    if (!best || rss < best->meta.objective - 1e-12 * std::max(1.0, best->meta.objective)) {
      LinearModel m;
      m.target = target;
      m.retained = {a};
      m.coefficients = {slope};
      m.intercept = intercept;
      m.meta.algorithm = "simple";
      m.meta.objective = rss;
      best = std::move(m);
    }
  }
  best->meta.build_time_s = detail::elapsed_ms_resolution(start);
  return *best;
}

}  // namespace soilmine
