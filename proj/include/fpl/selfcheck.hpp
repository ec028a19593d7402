/*
 * Copyright 2026 fpl-lab contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef FPL_SELFCHECK_HPP_
#define FPL_SELFCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fpl/diagnostics.hpp"
#include "fpl/fpa.hpp"
#include "fpl/loss.hpp"
#include "fpl/numerics.hpp"

namespace fpl {

struct CheckResult {
  std::string name;
  bool passed;
  std::size_t cases;
  std::string detail;
};

namespace detail {

struct InstanceGen {
  std::mt19937_64 rng;

  std::size_t classes(std::size_t lo = 2, std::size_t hi = 10) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  }
  LogitVector logits(std::size_t C, double range = 5.0) {
    std::uniform_real_distribution<double> u(-range, range);
    std::vector<double> z(C);
    for (double& v : z) v = u(rng);
    return LogitVector(std::move(z));
  }
  /// A random set of 1..C-1 distinct classes.
  FuzzyPositiveSet subset(std::size_t C) {
    std::vector<std::size_t> all(C);
    for (std::size_t c = 0; c < C; ++c) all[c] = c;
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(std::uniform_int_distribution<std::size_t>(1, C - 1)(rng));
    return FuzzyPositiveSet(std::move(all));
  }
  ProbDist simplex(std::size_t C) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> p(C);
    double s = 0.0;
    for (double& v : p) s += (v = e(rng));
    for (double& v : p) v /= s;
    return ProbDist(std::move(p));
  }
};

}  // namespace detail

/// Built-in invariant suite behind `fpl-lab selfcheck`. Each check samples
/// `n` random instances from a seeded stream.
inline std::vector<CheckResult> run_selfcheck(std::uint64_t seed = 7, std::size_t n = 500) {
  detail::InstanceGen gen{std::mt19937_64(seed)};
  std::vector<CheckResult> results;

  {
    double worst = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      const auto C = gen.classes();
      const auto z = gen.logits(C);
      const std::size_t i = std::uniform_int_distribution<std::size_t>(0, C - 1)(gen.rng);
      const FuzzyPositiveSet Y{i};
      worst = std::max(worst, std::abs(fuzzy_loss(z, Y) - vanilla_loss(z, i)));
      const auto gf = fuzzy_grad(z, Y);
      const auto gv = vanilla_grad(z, i);
      for (std::size_t c = 0; c < C; ++c) worst = std::max(worst, std::abs(gf[c] - gv[c]));
    }
    results.push_back({"single-label reduction", worst < 1e-12, n, "max deviation " + std::to_string(worst)});
  }

  {
    double worst = 0.0;
    const double h = 1e-5;
    for (std::size_t s = 0; s < n; ++s) {
      const auto C = gen.classes();
      const auto z = gen.logits(C);
      const auto Y = gen.subset(C);
      const auto g = fuzzy_grad(z, Y);
      for (std::size_t c = 0; c < C; ++c) {
        std::vector<double> up(z.values().begin(), z.values().end());
        auto down = up;
        up[c] += h;
        down[c] -= h;
        const double fd = (fuzzy_loss(LogitVector(up), Y) - fuzzy_loss(LogitVector(down), Y)) / (2 * h);
        worst = std::max(worst, std::abs(fd - g[c]) / std::max(std::abs(g[c]), 1e-3));
      }
    }
    results.push_back({"gradient vs finite differences", worst < 1e-6, n, "max rel error " + std::to_string(worst)});
  }

  {
    bool ok = true;
    for (std::size_t s = 0; s < n && ok; ++s) {
      const auto C = gen.classes();
      const auto z = gen.logits(C);
      const auto Y = gen.subset(C);
      const auto g = fuzzy_grad(z, Y);
      double pos = 0.0;
      double neg = 0.0;
      for (std::size_t c = 0; c < C; ++c) {
        (Y.contains(c) ? pos : neg) += g[c];
        if (Y.contains(c) ? g[c] > 0.0 : g[c] < 0.0) ok = false;
      }
      const std::size_t gt = std::uniform_int_distribution<std::size_t>(0, C - 1)(gen.rng);
      ok = ok && std::abs(g.sum()) < 1e-12 && std::abs(std::abs(pos) - neg) < 1e-12 &&
           g.norm() <= std::sqrt(2.0) + 1e-12 && ideal_gradient(z, gt).norm() <= std::sqrt(2.0) + 1e-12 &&
           fuzzy_loss(z, Y) >= hinge_loss(z, Y);
    }
    results.push_back({"gradient structure and loss dominance", ok, n, ""});
  }

  {
    const double grid[] = {0.5, 0.75, 0.85, 0.9, 0.95, 0.99};
    bool ok = true;
    std::vector<ProbDist> probs;
    for (std::size_t s = 0; s < n; ++s) {
      const auto C = gen.classes();
      auto p = gen.simplex(C);
      std::size_t prev = 0;
      const double pmax = *std::max_element(p.values().begin(), p.values().end());
      for (double T : grid) {
        const auto k = select_k(p, T);
        ok = ok && k >= 1 && k <= C - 1 && k >= prev && (!(pmax > T) || k == 1);
        prev = k;
      }
      probs.push_back(std::move(p));
    }
    for (double T : grid) ok = ok && vanishing_stats(probs, T).violations == 0;
    results.push_back({"K selection bounds and monotonicity", ok, n, ""});
  }

  {
    bool ok = true;
    for (std::size_t s = 0; s < n; ++s) {
      const auto C = gen.classes(3, 10);
      const auto z = gen.logits(C);
      const auto Y = assign(softmax(z), 0.9);
      for (std::size_t gt = 0; gt < C; ++gt) {
        const auto r = score_sample(z, Y, gt);
        switch (r.label) {
          case CaseLabel::case1:
            ok = ok && r.r_vanilla == 1.0 && r.r_fuzzy >= 0.0 && r.r_fuzzy <= 1.0;
            break;
          case CaseLabel::case2:
            ok = ok && r.r_fuzzy >= 0.0 && r.r_fuzzy <= 1.0 && r.r_vanilla >= -1.0 && r.r_vanilla <= 0.0;
            break;
          case CaseLabel::case3:
            ok = ok && r.r_fuzzy >= -1.0 && r.r_fuzzy <= 0.0 && r.r_vanilla >= -1.0 && r.r_vanilla <= 0.0;
            break;
        }
      }
    }
    results.push_back({"positive gradient score signs", ok, n, ""});
  }

  {
    const ProbDist p{0.6, 0.3, 0.08, 0.02};
    const FuzzyPositiveSet Y{0, 1};
    const double w = adaptive_weight(p, Y, {50.0, 0.9});
    bool ok = std::abs(w - 0.940900) <= 1e-5;
    // S = 0.5 over K = 2; the largest negative m sweeps [0.05, 0.25] while the
    // remaining mass is spread over nine smaller classes.
    double prev = 2.0;
    for (int i = 0; i < 100; ++i) {
      const double m = 0.05 + 0.2 * i / 99.0;
      std::vector<double> q(12, (0.5 - m) / 9.0);
      q[0] = q[1] = 0.25;
      q[2] = m;
      const double wi = adaptive_weight(ProbDist(std::move(q)), Y, {50.0, 0.9});
      ok = ok && wi < prev && wi >= 0.0 && wi < 1.0;
      prev = wi;
    }
    results.push_back({"adaptive weight", ok, 101, "w = " + std::to_string(w)});
  }
  return results;
}

}  // namespace fpl

#endif  // FPL_SELFCHECK_HPP_
