/*
 * Copyright 2026 fpl-lab contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "fpl/numerics.hpp"
#include "oracle.hpp"

using namespace fpl;

TEST(Softmax, SymmetricPair) {
  const auto p = softmax(LogitVector{0.0, 0.0});
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
}

TEST(Softmax, LargeLogitDoesNotOverflow) {
  const auto p = softmax(LogitVector{1000.0, 0.0});
  EXPECT_TRUE(std::isfinite(p[0]));
  EXPECT_NEAR(p[0], 1.0, 1e-15);
  EXPECT_NEAR(p[1], 0.0, 1e-15);
}

TEST(Softmax, MatchesHighPrecision) {
  const std::vector<double> z{1.0, 0.0, 0.0};
  const auto p = softmax(LogitVector(z));
  const auto ref = oracle::softmax(z);
  // 0.576117, 0.211942, 0.211942
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(p[c], ref[c], 1e-15);
  EXPECT_NEAR(p[0], 0.576117, 1e-5);
  EXPECT_NEAR(p[1], 0.211942, 1e-5);
}

TEST(Softmax, RejectsNonFinite) {
  EXPECT_THROW(LogitVector({0.0, std::numeric_limits<double>::quiet_NaN()}), Error);
  EXPECT_THROW(LogitVector({0.0, std::numeric_limits<double>::infinity()}), Error);
  EXPECT_THROW(LogitVector({1.0}), Error);
}

TEST(Softmax, ShiftInvariantAndOrderPreserving) {
  oracle::Gen gen(11);
  for (int s = 0; s < 500; ++s) {
    const auto C = gen.uniform_int(2, 10);
    auto z = gen.logits(C);
    const double shift = gen.uniform(-50, 50);
    auto shifted = z;
    for (double& v : shifted) v += shift;
    const auto p = softmax(LogitVector(z));
    const auto q = softmax(LogitVector(shifted));
    double sum = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      EXPECT_NEAR(p[c], q[c], 1e-12);
      sum += p[c];
      for (std::size_t d = 0; d < C; ++d) {
        if (z[c] > z[d]) {
          EXPECT_GT(p[c], p[d]);
        }
      }
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(LogSumExp, Examples) {
  EXPECT_DOUBLE_EQ(log_sum_exp({0.0}), 0.0);
  EXPECT_NEAR(log_sum_exp({0.0, 0.0}), std::log(2.0), 1e-15);
  const double big = log_sum_exp({1000.0, 1000.0});
  EXPECT_TRUE(std::isfinite(big));
  EXPECT_NEAR(big, 1000.0 + std::log(2.0), 1e-12);
  EXPECT_THROW(log_sum_exp(std::span<const double>{}), Error);
}

TEST(LogSumExp, BetweenMaxAndMaxPlusLogN) {
  oracle::Gen gen(12);
  for (int s = 0; s < 1000; ++s) {
    const auto n = gen.uniform_int(1, 12);
    const auto xs = gen.logits(n, 300.0);
    const double m = *std::max_element(xs.begin(), xs.end());
    const double v = log_sum_exp(xs);
    EXPECT_GE(v, m);
    EXPECT_LE(v, m + std::log(static_cast<double>(n)) + 1e-12);
  }
}

TEST(Softplus, Examples) {
  EXPECT_NEAR(softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(softplus(1000.0), 1000.0, 1e-12);
  const double tiny = softplus(-1000.0);
  EXPECT_GE(tiny, 0.0);
  EXPECT_LT(tiny, 1e-300);
  EXPECT_THROW(softplus(std::numeric_limits<double>::infinity()), Error);
}

TEST(Softplus, BoundedByRelu) {
  oracle::Gen gen(13);
  for (int s = 0; s < 2000; ++s) {
    const double x = gen.uniform(-60, 60);
    const double relu = std::max(x, 0.0);
    EXPECT_GE(softplus(x), relu);
    EXPECT_LE(softplus(x), relu + std::log(2.0) + 1e-15);
  }
  // Both sides of the switch-over agree.
  EXPECT_NEAR(softplus(kSoftplusSwitch - 1e-9), softplus(kSoftplusSwitch + 1e-9), 1e-8);
}

TEST(SortDesc, Examples) {
  EXPECT_EQ(sort_desc(ProbDist{0.2, 0.5, 0.3}), (std::vector<std::size_t>{1, 2, 0}));
  EXPECT_EQ(sort_desc(ProbDist{0.4, 0.4, 0.2}), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(sort_desc(ProbDist{0.25, 0.25, 0.25, 0.25}), (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(SortDesc, BijectionWithIndexTieBreak) {
  oracle::Gen gen(14);
  for (int s = 0; s < 500; ++s) {
    const auto C = gen.uniform_int(2, 10);
    // Coarse values force duplicates.
    std::vector<double> raw(C);
    double sum = 0.0;
    for (double& v : raw) sum += (v = static_cast<double>(gen.uniform_int(1, 3)));
    for (double& v : raw) v /= sum;
    const ProbDist p(raw);
    const auto order = sort_desc(p);
    auto seen = order;
    std::sort(seen.begin(), seen.end());
    for (std::size_t c = 0; c < C; ++c) EXPECT_EQ(seen[c], c);
    for (std::size_t i = 1; i < C; ++i) {
      EXPECT_GE(p[order[i - 1]], p[order[i]]);
      if (p[order[i - 1]] == p[order[i]]) {
        EXPECT_LT(order[i - 1], order[i]);
      }
    }
  }
}

TEST(ProbDist, Validation) {
  EXPECT_THROW(ProbDist({0.5, 0.6}), Error);
  EXPECT_THROW(ProbDist({-0.1, 1.1}), Error);
  EXPECT_NO_THROW(ProbDist({0.6, 0.3, 0.08, 0.02}));
}
