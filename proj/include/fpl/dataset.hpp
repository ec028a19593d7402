/*
 * Copyright 2026 fpl-lab contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef FPL_DATASET_HPP_
#define FPL_DATASET_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "fpl/config.hpp"

namespace fpl {

enum class Split { labeled, unlabeled, test };

/// One toy sample. Unlabeled samples keep their true class in `label` so the
/// diagnostics can score them; the optimizer never reads it.
struct SampleRecord {
  std::vector<double> features;
  std::optional<std::size_t> label;
  Split split = Split::labeled;
};

namespace detail {

// Stream tags keep the seeded random streams of one run independent.
enum class Stream : std::uint64_t { dataset = 1, init = 2, shuffle = 3, noise = 4 };

inline std::mt19937_64 make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace detail

/**
 * Class centres. Classes 0 and 1 form the confusable pair, placed
 * `confusable_separation` apart on the first axis; the remaining classes sit
 * on a circle of radius `separation` around the pair's midpoint.
 */
inline std::vector<std::vector<double>> blob_centers(const TrainConfig& cfg) {
  std::vector<std::vector<double>> centers(cfg.C, std::vector<double>(cfg.D, 0.0));
  const double unit = cfg.blob_sigma;
  centers[1][0] = cfg.confusable_separation * unit;
  const double mid = 0.5 * cfg.confusable_separation * unit;
  const std::size_t others = cfg.C - 2;
  for (std::size_t c = 2; c < cfg.C; ++c) {
    const double angle =
        std::numbers::pi / 2 + 2 * std::numbers::pi * static_cast<double>(c - 2) / static_cast<double>(others);
    centers[c][0] = mid + cfg.separation * unit * std::cos(angle);
    centers[c][1] = cfg.separation * unit * std::sin(angle);
  }
  return centers;
}

inline std::size_t test_set_size(const TrainConfig& cfg) { return std::max<std::size_t>(200, cfg.L); }

/// L labeled, U unlabeled and max(200, L) test samples, classes assigned round-robin.
inline std::vector<SampleRecord> make_dataset(const TrainConfig& cfg) {
  cfg.validate();
  const auto centers = blob_centers(cfg);
  auto rng = detail::make_rng(cfg.seed, detail::Stream::dataset);
  std::normal_distribution<double> gauss(0.0, cfg.blob_sigma);

  std::vector<SampleRecord> out;
  out.reserve(cfg.L + cfg.U + test_set_size(cfg));
  const auto emit = [&](std::size_t count, Split split) {
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t label = i % cfg.C;
      SampleRecord rec;
      rec.features.resize(cfg.D);
      for (std::size_t d = 0; d < cfg.D; ++d) rec.features[d] = centers[label][d] + gauss(rng);
      rec.label = label;
      rec.split = split;
      out.push_back(std::move(rec));
    }
  };
  emit(cfg.L, Split::labeled);
  emit(cfg.U, Split::unlabeled);
  emit(test_set_size(cfg), Split::test);
  return out;
}

inline std::vector<SampleRecord> select_split(const std::vector<SampleRecord>& data, Split split) {
  std::vector<SampleRecord> out;
  for (const auto& rec : data) {
    if (rec.split == split) out.push_back(rec);
  }
  return out;
}

}  // namespace fpl

#endif  // FPL_DATASET_HPP_
