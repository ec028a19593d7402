/*
 * Copyright 2026 fpl-lab contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef FPL_NUMERICS_HPP_
#define FPL_NUMERICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpl/error.hpp"

namespace fpl {

namespace detail {

inline void require_finite(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw Error(Errc::invalid_input, std::string(what) + " contains a non-finite entry");
  }
}

}  // namespace detail

/// Raw per-class scores for one sample. At least two classes, all entries finite.
class LogitVector {
 public:
  explicit LogitVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) throw Error(Errc::invalid_input, "logit vector needs at least two classes");
    detail::require_finite(values_, "logit vector");
  }
  LogitVector(std::initializer_list<double> values) : LogitVector(std::vector<double>(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t c) const { return values_[c]; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const LogitVector&, const LogitVector&) = default;

 private:
  std::vector<double> values_;
};

/// A point on the probability simplex.
class ProbDist {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit ProbDist(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) throw Error(Errc::invalid_input, "distribution needs at least two classes");
    double sum = 0.0;
    for (double v : values_) {
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw Error(Errc::invalid_input, "probability outside [0, 1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) throw Error(Errc::invalid_input, "probabilities do not sum to 1");
  }
  ProbDist(std::initializer_list<double> values) : ProbDist(std::vector<double>(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t c) const { return values_[c]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  struct Trusted {};
  ProbDist(Trusted, std::vector<double> values) : values_(std::move(values)) {}
  friend ProbDist softmax(const LogitVector& z);

  std::vector<double> values_;
};

/// m + log(sum exp(x - m)) with m = max(xs).
inline double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) throw Error(Errc::invalid_input, "log_sum_exp of an empty sequence");
  detail::require_finite(xs, "log_sum_exp input");
  const double m = *std::max_element(xs.begin(), xs.end());
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

inline double log_sum_exp(std::initializer_list<double> xs) {
  return log_sum_exp(std::span<const double>(xs.begin(), xs.size()));
}

inline constexpr double kSoftplusSwitch = 30.0;

/// log(1 + exp(x)), evaluated without overflow.
inline double softplus(double x) {
  if (!std::isfinite(x)) throw Error(Errc::invalid_input, "softplus of a non-finite value");
  if (x > kSoftplusSwitch) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

/// 1 / (1 + exp(-x)); the derivative of softplus.
inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline ProbDist softmax(const LogitVector& z) {
  const auto zs = z.values();
  const double m = *std::max_element(zs.begin(), zs.end());
  std::vector<double> p(zs.size());
  double total = 0.0;
  for (std::size_t c = 0; c < zs.size(); ++c) {
    p[c] = std::exp(zs[c] - m);
    total += p[c];
  }
  for (double& v : p) v /= total;
  return ProbDist(ProbDist::Trusted{}, std::move(p));
}

/// Class indices by descending probability; equal probabilities keep ascending index order.
inline std::vector<std::size_t> sort_desc(std::span<const double> p) {
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  return order;
}

inline std::vector<std::size_t> sort_desc(const ProbDist& p) { return sort_desc(p.values()); }

/// First index of the largest entry.
inline std::size_t argmax(std::span<const double> xs) {
  return static_cast<std::size_t>(std::max_element(xs.begin(), xs.end()) - xs.begin());
}

}  // namespace fpl

#endif  // FPL_NUMERICS_HPP_
