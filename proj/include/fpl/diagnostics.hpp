/*
 * Copyright 2026 fpl-lab contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef FPL_DIAGNOSTICS_HPP_
#define FPL_DIAGNOSTICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "fpl/error.hpp"
#include "fpl/fpa.hpp"
#include "fpl/loss.hpp"
#include "fpl/numerics.hpp"

namespace fpl {

/// Where the ground truth sits relative to the pseudo label and the fuzzy set.
enum class CaseLabel {
  case1,  // pseudo label correct
  case2,  // pseudo label wrong, ground truth inside the set
  case3,  // ground truth outside the set
};

inline int case_number(CaseLabel c) { return static_cast<int>(c) + 1; }

inline CaseLabel classify_case(const FuzzyPositiveSet& Y, std::size_t pseudo, std::size_t gt) {
  if (!Y.contains(pseudo)) throw Error(Errc::inconsistent_assignment, "pseudo label is not in the fuzzy positive set");
  if (gt == pseudo) return CaseLabel::case1;
  return Y.contains(gt) ? CaseLabel::case2 : CaseLabel::case3;
}

enum class GradientSource { fuzzy, vanilla };

/**
 * Positive gradient score: the gradient on the ground-truth logit relative to
 * the total gradient on the positive classes.
 *
 * For `fuzzy` the positives are Y; for `vanilla` they are the singleton pseudo
 * label Y.top1(). When gt is itself positive the score is the plain quotient
 * and lies in [0, 1]. When gt is a negative class the quotient's sign is
 * ambiguous, so the score is -|g_gt| / |sum of positive gradients|; for the
 * fuzzy loss this is -exp(z_gt) / sum_{j not in Y} exp(z_j).
 */
inline double positive_gradient_score(const LogitVector& z, const FuzzyPositiveSet& Y, std::size_t gt,
                                      GradientSource which) {
  detail::check_class(gt, z.size());
  const bool fuzzy = which == GradientSource::fuzzy;
  const GradVector g = fuzzy ? fuzzy_grad(z, Y) : vanilla_grad(z, Y.top1());
  const auto is_positive = [&](std::size_t c) { return fuzzy ? Y.contains(c) : c == Y.top1(); };

  double positive_sum = 0.0;
  double negative_sum = 0.0;
  for (std::size_t c = 0; c < z.size(); ++c) {
    if (is_positive(c))
      positive_sum += g[c];
    else
      negative_sum += std::abs(g[c]);
  }
  if (positive_sum == 0.0) throw Error(Errc::undefined_score, "positive-class gradient mass vanished");
  if (is_positive(gt)) return g[gt] / positive_sum;
  // Both sides carry the same mass; dividing by the side holding gt keeps |r| <= 1 after rounding.
  return -std::abs(g[gt]) / negative_sum;
}

struct ScoreReport {
  double r_fuzzy;
  double r_vanilla;
  CaseLabel label;
};

inline ScoreReport score_sample(const LogitVector& z, const FuzzyPositiveSet& Y, std::size_t gt) {
  return {positive_gradient_score(z, Y, gt, GradientSource::fuzzy),
          positive_gradient_score(z, Y, gt, GradientSource::vanilla), classify_case(Y, Y.top1(), gt)};
}

struct AssignmentStats {
  double avg_k = 0.0;
  double impurity = 0.0;
  double frac_k1 = 0.0;
  std::vector<std::size_t> k_histogram;  // k_histogram[K] = number of sets of size K
};

/// Mean set size and the fraction of samples whose ground truth is missed.
inline AssignmentStats assignment_stats(std::span<const FuzzyPositiveSet> sets, std::span<const std::size_t> gts) {
  if (sets.empty()) throw Error(Errc::invalid_input, "no assignments");
  if (sets.size() != gts.size()) throw Error(Errc::invalid_input, "assignments and labels differ in length");
  AssignmentStats stats;
  std::size_t k_total = 0;
  std::size_t missed = 0;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    const std::size_t k = sets[s].k();
    if (stats.k_histogram.size() <= k) stats.k_histogram.resize(k + 1, 0);
    ++stats.k_histogram[k];
    k_total += k;
    if (!sets[s].contains(gts[s])) ++missed;
  }
  const auto n = static_cast<double>(sets.size());
  stats.avg_k = static_cast<double>(k_total) / n;
  stats.impurity = static_cast<double>(missed) / n;
  stats.frac_k1 = stats.k_histogram.size() > 1 ? static_cast<double>(stats.k_histogram[1]) / n : 0.0;
  return stats;
}

/// Cross-entropy gradient against the true label.
inline GradVector ideal_gradient(const LogitVector& z, std::size_t gt) { return vanilla_grad(z, gt); }

inline double cosine_similarity(const GradVector& a, const GradVector& b) {
  if (a.size() != b.size()) throw Error(Errc::invalid_input, "gradients differ in length");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw Error(Errc::undefined_similarity, "zero gradient vector");
  double dot = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) dot += a[c] * b[c];
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

struct VanishingSummary {
  std::vector<double> excluded_mass;  // per sample, sum of p outside the assigned set
  double min_mass = 0.0;
  double mean_mass = 0.0;
  std::size_t bounded = 0;     // samples with cut-off n >= 2, to which the 1 - T floor applies
  std::size_t violations = 0;  // bounded samples whose excluded mass fell below 1 - T
};

/// Probability mass left outside the fuzzy set. With K = n - 1 that mass is
/// at least 1 - T, which keeps the positive-class gradients away from zero.
inline VanishingSummary vanishing_stats(std::span<const ProbDist> probs, double T) {
  VanishingSummary out;
  if (probs.empty()) return out;
  out.min_mass = std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (const auto& p : probs) {
    const auto cut = select_cutoff(p, T);
    const auto Y = assign(p, T);
    const auto in_set = Y.mask(p.size());
    double mass = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
      if (!in_set[c]) mass += p[c];
    }
    out.excluded_mass.push_back(mass);
    out.min_mass = std::min(out.min_mass, mass);
    total += mass;
    if (cut.n >= 2) {
      ++out.bounded;
      // Probabilities only sum to 1 up to ProbDist::kSumTolerance.
      if (mass < (1.0 - T) - ProbDist::kSumTolerance) ++out.violations;
    }
  }
  out.mean_mass = total / static_cast<double>(probs.size());
  return out;
}

}  // namespace fpl

#endif  // FPL_DIAGNOSTICS_HPP_
