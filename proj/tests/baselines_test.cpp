/*
 * Copyright 2026 fpl-lab contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fpl/baselines.hpp"
#include "oracle.hpp"

using namespace fpl;

TEST(NegativeLoss, Examples) {
  EXPECT_NEAR(negative_loss(ProbDist{0.5, 0.3, 0.2}, {0, 1}), 0.22314355131420976, 1e-15);
  EXPECT_EQ(negative_loss(ProbDist{0.7, 0.3, 0.0}, {0, 1}), 0.0);
  EXPECT_NEAR(negative_loss(ProbDist{0.5, 0.25, 0.25}, {0}), 0.57536414490356185, 1e-15);
}

TEST(NegativeLoss, DivergesWhenNegativeClassIsCertain) {
  try {
    negative_loss(ProbDist{0.0, 0.0, 1.0}, {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::divergent_loss);
  }
}

TEST(NegativeLoss, NonNegativeAndIncreasingInNegativeMass) {
  oracle::Gen gen(41);
  for (int s = 0; s < 500; ++s) {
    const auto C = gen.uniform_int(3, 8);
    auto p = gen.simplex(C);
    const auto order = sort_desc(p);
    const FuzzyPositiveSet Y{order[0]};
    const double base = negative_loss(ProbDist(p), Y);
    EXPECT_GE(base, 0.0);
    // Move mass from the positive class to one negative class.
    const std::size_t j = order[1];
    const double delta = 0.5 * p[order[0]];
    p[order[0]] -= delta;
    p[j] += delta;
    EXPECT_GT(negative_loss(ProbDist(p), Y), base);
  }
}

TEST(NegativeLoss, LogitFormAgreesWithProbabilityForm) {
  oracle::Gen gen(42);
  for (int s = 0; s < 500; ++s) {
    const auto C = gen.uniform_int(2, 10);
    const LogitVector z(gen.logits(C));
    const FuzzyPositiveSet Y(gen.subset(C));
    EXPECT_NEAR(negative_loss_logits(z, Y), negative_loss(softmax(z), Y), 1e-12);
  }
}

TEST(NegativeGrad, MatchesFiniteDifferencesThroughSoftmax) {
  oracle::Gen gen(43);
  for (int s = 0; s < 300; ++s) {
    const auto C = gen.uniform_int(2, 10);
    const auto z = gen.logits(C);
    const FuzzyPositiveSet Y(gen.subset(C));
    const auto fd = oracle::central_diff(
        [&](const std::vector<double>& x) { return negative_loss(softmax(LogitVector(x)), Y); }, z);
    const auto g = negative_grad(LogitVector(z), Y);
    for (std::size_t c = 0; c < C; ++c) EXPECT_NEAR(g[c], fd[c], 1e-7 * std::max(1.0, std::abs(fd[c])));
  }
}

TEST(NegativeGrad, ConcentratesOnTopClassUnlikeFuzzy) {
  oracle::Gen gen(44);
  int checked = 0;
  for (int s = 0; s < 500; ++s) {
    const auto C = gen.uniform_int(3, 10);
    const auto z = gen.logits(C);
    const auto p = softmax(LogitVector(z));
    const auto order = sort_desc(p);
    if (p[order[0]] == p[order[1]]) continue;
    const FuzzyPositiveSet Y = assign(p, 0.9);
    if (Y.k() < 2) continue;
    ++checked;
    const auto fd = oracle::central_diff(
        [&](const std::vector<double>& x) { return negative_loss(softmax(LogitVector(x)), Y); }, z);
    std::size_t strongest = Y.top1();
    for (std::size_t i : Y.indices()) {
      if (std::abs(fd[i]) > std::abs(fd[strongest])) strongest = i;
    }
    EXPECT_EQ(strongest, order[0]);
    // The fuzzy gradient pushes every member of Y up.
    const auto gf = fuzzy_grad(LogitVector(z), Y);
    for (std::size_t i : Y.indices()) EXPECT_LT(gf[i], 0.0);
  }
  EXPECT_GT(checked, 100);
}

TEST(NegativeHingeForm, Examples) {
  EXPECT_EQ(negative_loss_hinge_form(LogitVector{2, 1, 0}, {0, 1}), 0.0);
  EXPECT_EQ(negative_loss_hinge_form(LogitVector{0, 0, 3}, {0, 1}), 3.0);
  EXPECT_EQ(negative_loss_hinge_form(LogitVector{0, 0, 0}, {0, 1}), 0.0);
}

TEST(SoftLoss, Examples) {
  const ProbDist p{0.2, 0.3, 0.5};
  EXPECT_EQ(soft_loss(p, p), 0.0);
  EXPECT_NEAR(soft_loss(ProbDist{0.5, 0.5}, ProbDist{1.0, 0.0}), std::log(2.0), 1e-15);
  EXPECT_NEAR(soft_loss(ProbDist{0.9, 0.1}, ProbDist{0.5, 0.5}), 0.51082562376599068, 1e-15);
}

TEST(SoftLoss, Errors) {
  EXPECT_THROW(soft_loss(ProbDist{1.0, 0.0}, ProbDist{0.5, 0.5}), Error);
  EXPECT_THROW(soft_loss(ProbDist{0.5, 0.5}, ProbDist{0.2, 0.3, 0.5}), Error);
}

TEST(SoftLoss, GibbsInequality) {
  oracle::Gen gen(45);
  for (int s = 0; s < 1000; ++s) {
    const auto C = gen.uniform_int(2, 10);
    const ProbDist p(gen.simplex(C));
    const ProbDist q(gen.simplex(C));
    EXPECT_GT(soft_loss(p, q), 0.0);
    EXPECT_EQ(soft_loss(q, q), 0.0);
  }
}

TEST(SoftGrad, MatchesFiniteDifferences) {
  oracle::Gen gen(46);
  for (int s = 0; s < 200; ++s) {
    const auto C = gen.uniform_int(2, 8);
    const auto z = gen.logits(C);
    const ProbDist q(gen.simplex(C));
    const auto fd =
        oracle::central_diff([&](const std::vector<double>& x) { return soft_loss(softmax(LogitVector(x)), q); }, z);
    const auto g = soft_grad(LogitVector(z), q);
    for (std::size_t c = 0; c < C; ++c) EXPECT_NEAR(g[c], fd[c], 1e-8);
  }
}
