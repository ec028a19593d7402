/*
 * Copyright 2026 fpl-lab contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef FPL_LOSS_HPP_
#define FPL_LOSS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "fpl/error.hpp"
#include "fpl/fpa.hpp"
#include "fpl/numerics.hpp"

namespace fpl {

/// dL/dz, one entry per class.
class GradVector {
 public:
  explicit GradVector(std::vector<double> values) : values_(std::move(values)) {
    detail::require_finite(values_, "gradient");
  }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t c) const { return values_[c]; }
  std::span<const double> values() const noexcept { return values_; }

  double sum() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
  }
  double norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s);
  }

  GradVector operator-() const {
    auto neg = values_;
    for (double& v : neg) v = -v;
    return GradVector(std::move(neg));
  }

 private:
  std::vector<double> values_;
};

struct WeightParams {
  double scale = 50.0;  // A
  double t = 0.9;       // cumulative bound used when the set was assigned
};

namespace detail {

/// The two log-sum-exp halves of the smoothed loss:
/// pos = log sum_{i in Y} exp(-z_i), neg = log sum_{j not in Y} exp(z_j).
struct FuzzyTerms {
  double pos;
  double neg;
  std::vector<bool> in_set;
};

inline FuzzyTerms fuzzy_terms(const LogitVector& z, const FuzzyPositiveSet& Y) {
  auto in_set = Y.mask(z.size());
  std::vector<double> pos_args;
  std::vector<double> neg_args;
  pos_args.reserve(Y.k());
  neg_args.reserve(z.size() - Y.k());
  for (std::size_t c = 0; c < z.size(); ++c) {
    if (in_set[c])
      pos_args.push_back(-z[c]);
    else
      neg_args.push_back(z[c]);
  }
  return {log_sum_exp(pos_args), log_sum_exp(neg_args), std::move(in_set)};
}

inline void check_class(std::size_t c, std::size_t num_classes) {
  if (c >= num_classes) throw Error(Errc::invalid_input, "class index out of range");
}

}  // namespace detail

/// ReLU(max_{j not in Y} z_j - min_{i in Y} z_i): the unsmoothed ordering loss.
inline double hinge_loss(const LogitVector& z, const FuzzyPositiveSet& Y) {
  const auto in_set = Y.mask(z.size());
  double min_pos = std::numeric_limits<double>::infinity();
  double max_neg = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < z.size(); ++c) {
    if (in_set[c])
      min_pos = std::min(min_pos, z[c]);
    else
      max_neg = std::max(max_neg, z[c]);
  }
  return std::max(0.0, max_neg - min_pos);
}

/**
 * Smoothed fuzzy positive loss
 *
 *   log(1 + sum_{i in Y} exp(-z_i) * sum_{j not in Y} exp(z_j))
 *
 * evaluated as softplus(pos + neg) on the two log-sum-exp halves, so the
 * products never materialise.
 */
inline double fuzzy_loss(const LogitVector& z, const FuzzyPositiveSet& Y) {
  const auto t = detail::fuzzy_terms(z, Y);
  return softplus(t.pos + t.neg);
}

/// Analytic gradient of fuzzy_loss. Positive classes get non-positive entries,
/// negative classes non-negative ones, and both sides carry the same mass.
inline GradVector fuzzy_grad(const LogitVector& z, const FuzzyPositiveSet& Y) {
  const auto t = detail::fuzzy_terms(z, Y);
  const double s = logistic(t.pos + t.neg);
  std::vector<double> g(z.size());
  for (std::size_t c = 0; c < z.size(); ++c) {
    if (t.in_set[c])
      g[c] = -s * std::exp(-z[c] - t.pos);
    else
      g[c] = s * std::exp(z[c] - t.neg);
  }
  return GradVector(std::move(g));
}

/// Cross-entropy against a single (pseudo) label.
inline double vanilla_loss(const LogitVector& z, std::size_t pseudo) {
  detail::check_class(pseudo, z.size());
  return log_sum_exp(z.values()) - z[pseudo];
}

/// p - onehot(pseudo). The pseudo-label entry is formed as minus the mass of
/// the other classes, which equals p - 1 without the cancellation.
inline GradVector vanilla_grad(const LogitVector& z, std::size_t pseudo) {
  detail::check_class(pseudo, z.size());
  const auto p = softmax(z);
  std::vector<double> g(p.values().begin(), p.values().end());
  double rest = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (c != pseudo) rest += g[c];
  }
  g[pseudo] = -rest;
  return GradVector(std::move(g));
}

/**
 * Per-sample confidence weight
 *
 *   w = log(1 + A (S/K - m)) / log(1 + A S/K)
 *
 * where S is the probability mass inside Y and m the largest probability
 * outside it. Decreases from 1 (m = 0) to 0 (m = S/K).
 */
inline double adaptive_weight(const ProbDist& p, const FuzzyPositiveSet& Y, const WeightParams& params) {
  if (!(params.scale > 0.0) || !std::isfinite(params.scale))
    throw Error(Errc::invalid_config, "weight scale A must be positive");
  const auto in_set = Y.mask(p.size());
  double mass = 0.0;
  double max_neg = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (in_set[c])
      mass += p[c];
    else
      max_neg = std::max(max_neg, p[c]);
  }
  const double mean = mass / static_cast<double>(Y.k());
  // Ties between the K-th and (K+1)-th class can put m an ulp above the mean.
  if (max_neg > mean * (1.0 + 1e-12))
    throw Error(Errc::inconsistent_assignment, "largest negative probability exceeds the positive mean");
  const double gap = std::max(mean - max_neg, 0.0);
  return std::log1p(params.scale * gap) / std::log1p(params.scale * mean);
}

struct BatchItem {
  LogitVector z;
  FuzzyPositiveSet set;
  double weight = 1.0;
};

/// (1/S) sum_s w_s * fuzzy_loss(z_s, Y_s), summed in batch order.
inline double weighted_batch_loss(std::span<const BatchItem> batch) {
  if (batch.empty()) throw Error(Errc::invalid_input, "empty batch");
  double total = 0.0;
  for (const auto& item : batch) {
    if (!(item.weight >= 0.0 && item.weight <= 1.0)) throw Error(Errc::invalid_input, "batch weight outside [0, 1]");
    total += item.weight * fuzzy_loss(item.z, item.set);
  }
  return total / static_cast<double>(batch.size());
}

}  // namespace fpl

#endif  // FPL_LOSS_HPP_
