/*
 * Copyright 2026 fpl-lab contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef FPL_FPA_HPP_
#define FPL_FPA_HPP_

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "fpl/error.hpp"
#include "fpl/numerics.hpp"

namespace fpl {

/**
 * Fuzzy positive label set: the K classes treated as candidate ground truths
 * for one sample. Indices are kept in assignment order, so the first entry is
 * the top-1 (pseudo) label when the set came from assign().
 *
 * The set does not know the class count; functions that consume it check it
 * against the logit or probability vector they are given.
 */
class FuzzyPositiveSet {
 public:
  explicit FuzzyPositiveSet(std::vector<std::size_t> indices, double t_used = 0.0)
      : indices_(std::move(indices)), t_used_(t_used) {
    if (indices_.empty()) throw Error(Errc::invalid_input, "fuzzy positive set is empty");
    auto sorted = indices_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error(Errc::invalid_input, "fuzzy positive set has duplicate classes");
  }
  FuzzyPositiveSet(std::initializer_list<std::size_t> indices) : FuzzyPositiveSet(std::vector<std::size_t>(indices)) {}

  std::size_t k() const noexcept { return indices_.size(); }
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  std::size_t top1() const noexcept { return indices_.front(); }
  double t_used() const noexcept { return t_used_; }

  bool contains(std::size_t c) const { return std::find(indices_.begin(), indices_.end(), c) != indices_.end(); }

  /// Membership mask over `num_classes` classes. Throws if the set does not
  /// fit: an index out of range, or no class left over for the negative side.
  std::vector<bool> mask(std::size_t num_classes) const {
    if (k() >= num_classes) throw Error(Errc::invalid_input, "fuzzy positive set leaves no negative class");
    std::vector<bool> in(num_classes, false);
    for (std::size_t c : indices_) {
      if (c >= num_classes) throw Error(Errc::invalid_input, "fuzzy positive index out of range");
      in[c] = true;
    }
    return in;
  }

  friend bool operator==(const FuzzyPositiveSet& a, const FuzzyPositiveSet& b) { return a.indices_ == b.indices_; }

 private:
  std::vector<std::size_t> indices_;
  double t_used_;
};

/// Outcome of the cumulative scan: `n` is the 1-based cut-off position, `k = max(n - 1, 1)`.
struct KSelection {
  std::size_t n;
  std::size_t k;
};

/// Scans the sorted prediction until the running sum strictly exceeds T (or
/// the last class is reached) and keeps one class fewer than that.
inline KSelection select_cutoff(const ProbDist& p, double T) {
  if (!(T > 0.0 && T < 1.0)) throw Error(Errc::invalid_config, "cumulative bound T must lie in (0, 1)");
  const auto order = sort_desc(p);
  const std::size_t C = p.size();
  double cumulative = 0.0;
  std::size_t n = C;
  for (std::size_t i = 0; i < C; ++i) {
    cumulative += p[order[i]];
    if (cumulative > T || i + 1 == C) {
      n = i + 1;
      break;
    }
  }
  return {n, std::max<std::size_t>(n - 1, 1)};
}

inline std::size_t select_k(const ProbDist& p, double T) { return select_cutoff(p, T).k; }

/// Top-K classes of p, K chosen by select_k.
inline FuzzyPositiveSet assign(const ProbDist& p, double T) {
  const std::size_t k = select_k(p, T);
  auto order = sort_desc(p);
  order.resize(k);
  return FuzzyPositiveSet(std::move(order), T);
}

}  // namespace fpl

#endif  // FPL_FPA_HPP_
