/*
 * Copyright 2026 fpl-lab contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef FPL_BASELINES_HPP_
#define FPL_BASELINES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "fpl/error.hpp"
#include "fpl/fpa.hpp"
#include "fpl/loss.hpp"
#include "fpl/numerics.hpp"

namespace fpl {

// Negative learning: every class outside Y is pushed towards zero probability.

inline double negative_loss(const ProbDist& p, const FuzzyPositiveSet& Y) {
  const auto in_set = Y.mask(p.size());
  double loss = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (in_set[c]) continue;
    if (p[c] >= 1.0) throw Error(Errc::divergent_loss, "negative class has probability 1");
    loss -= std::log1p(-p[c]);
  }
  return loss;
}

/// sum_{j not in Y} ReLU(z_j - max_{i != j} z_i)
inline double negative_loss_hinge_form(const LogitVector& z, const FuzzyPositiveSet& Y) {
  const auto in_set = Y.mask(z.size());
  double loss = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (in_set[j]) continue;
    double best_other = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (i != j) best_other = std::max(best_other, z[i]);
    }
    loss += std::max(0.0, z[j] - best_other);
  }
  return loss;
}

namespace detail {

/// log(p_j / (1 - p_j)) = z_j - log sum_{i != j} exp(z_i), finite for finite logits.
inline double log_odds(const LogitVector& z, std::size_t j) {
  std::vector<double> others;
  others.reserve(z.size() - 1);
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i != j) others.push_back(z[i]);
  }
  return z[j] - log_sum_exp(others);
}

}  // namespace detail

/// negative_loss evaluated from logits: -log(1 - p_j) = softplus(log-odds of j).
inline double negative_loss_logits(const LogitVector& z, const FuzzyPositiveSet& Y) {
  const auto in_set = Y.mask(z.size());
  double loss = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (!in_set[j]) loss += softplus(detail::log_odds(z, j));
  }
  return loss;
}

/// Logit-space gradient of negative_loss by the chain rule through softmax:
/// dL/dz_k = [k not in Y] r_k - p_k sum_{j not in Y} r_j, with r_j = p_j / (1 - p_j).
inline GradVector negative_grad(const LogitVector& z, const FuzzyPositiveSet& Y) {
  const auto in_set = Y.mask(z.size());
  const auto p = softmax(z);
  std::vector<double> odds(z.size(), 0.0);
  double odds_sum = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (in_set[j]) continue;
    odds[j] = std::exp(detail::log_odds(z, j));
    odds_sum += odds[j];
  }
  std::vector<double> g(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) g[k] = odds[k] - p[k] * odds_sum;
  return GradVector(std::move(g));
}

/// KL(q || p), with 0 log(0 / .) = 0.
inline double soft_loss(const ProbDist& p, const ProbDist& q) {
  if (p.size() != q.size()) throw Error(Errc::invalid_input, "distributions differ in length");
  double kl = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (q[c] == 0.0) continue;
    if (p[c] == 0.0) throw Error(Errc::divergent_loss, "target mass on a zero-probability class");
    kl += q[c] * std::log(q[c] / p[c]);
  }
  return kl;
}

/// Gradient of soft_loss(softmax(z), q) with respect to z, q held fixed.
inline GradVector soft_grad(const LogitVector& z, const ProbDist& q) {
  if (z.size() != q.size()) throw Error(Errc::invalid_input, "distributions differ in length");
  const auto p = softmax(z);
  std::vector<double> g(z.size());
  for (std::size_t c = 0; c < z.size(); ++c) g[c] = p[c] - q[c];
  return GradVector(std::move(g));
}

}  // namespace fpl

#endif  // FPL_BASELINES_HPP_
