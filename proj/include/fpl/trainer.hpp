/*
 * Copyright 2026 fpl-lab contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef FPL_TRAINER_HPP_
#define FPL_TRAINER_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fpl/baselines.hpp"
#include "fpl/config.hpp"
#include "fpl/dataset.hpp"
#include "fpl/diagnostics.hpp"
#include "fpl/error.hpp"
#include "fpl/fpa.hpp"
#include "fpl/loss.hpp"
#include "fpl/model.hpp"
#include "fpl/numerics.hpp"

namespace fpl {

/// Everything the unsupervised term needs from the clean pass. Held constant
/// while differentiating: no gradient flows through assignment or weight.
struct UnlabeledTarget {
  FuzzyPositiveSet set;
  std::size_t pseudo;
  double weight;
  ProbDist clean_probs;
  std::vector<double> noise;
};

inline std::vector<UnlabeledTarget> prepare_targets(const Model& model, std::span<const SampleRecord> unlabeled,
                                                    const TrainConfig& cfg, std::uint64_t step) {
  auto rng = detail::make_rng(cfg.seed, detail::Stream::noise, step);
  std::optional<std::normal_distribution<double>> gauss;
  if (cfg.noise_sigma > 0.0) gauss.emplace(0.0, cfg.noise_sigma);

  std::vector<UnlabeledTarget> targets;
  targets.reserve(unlabeled.size());
  for (const auto& rec : unlabeled) {
    auto p = softmax(forward(model, rec.features));
    auto set = assign(p, cfg.T);
    const double w = cfg.use_weight ? adaptive_weight(p, set, {cfg.A, cfg.T}) : 1.0;
    std::vector<double> noise(rec.features.size(), 0.0);
    if (gauss) {
      for (double& e : noise) e = (*gauss)(rng);
    }
    const std::size_t pseudo = set.top1();
    targets.push_back({std::move(set), pseudo, w, std::move(p), std::move(noise)});
  }
  return targets;
}

struct ObjectiveValue {
  double sup_loss = 0.0;
  double uns_loss = 0.0;
  double total = 0.0;
  std::vector<double> grad;
  std::vector<LogitVector> perturbed_logits;
};

/// Per-sample unsupervised loss on the perturbed logits; writes dL/dz into `g`.
inline double unsupervised_term(Method method, const LogitVector& z, const UnlabeledTarget& t, bool use_weight,
                                std::vector<double>& g) {
  const auto copy = [&](const GradVector& gv) { g.assign(gv.values().begin(), gv.values().end()); };
  switch (method) {
    case Method::fpl: {
      const double w = use_weight ? t.weight : 1.0;
      copy(fuzzy_grad(z, t.set));
      for (double& v : g) v *= w;
      return w * fuzzy_loss(z, t.set);
    }
    case Method::vanilla:
      copy(vanilla_grad(z, t.pseudo));
      return vanilla_loss(z, t.pseudo);
    case Method::negative:
      copy(negative_grad(z, t.set));
      return negative_loss_logits(z, t.set);
    case Method::soft:
      copy(soft_grad(z, t.clean_probs));
      return soft_loss(softmax(z), t.clean_probs);
    case Method::supervised_only:
      g.assign(z.size(), 0.0);
      return 0.0;
  }
  return 0.0;
}

/**
 * Combined objective: mean supervised cross-entropy over the labeled batch
 * plus beta times the mean unsupervised loss over the unlabeled batch, with
 * its full parameter gradient. Targets are frozen, so the returned gradient
 * is the exact derivative of `total`.
 */
inline ObjectiveValue evaluate_objective(const Model& model, std::span<const SampleRecord> labeled,
                                         std::span<const SampleRecord> unlabeled,
                                         std::span<const UnlabeledTarget> targets, const TrainConfig& cfg) {
  if (targets.size() != unlabeled.size()) throw Error(Errc::invalid_input, "one target per unlabeled sample");
  ObjectiveValue out;
  out.grad.assign(model.parameter_count(), 0.0);

  if (!labeled.empty()) {
    const double scale = 1.0 / static_cast<double>(labeled.size());
    for (const auto& rec : labeled) {
      if (!rec.label) throw Error(Errc::invalid_input, "labeled sample without a label");
      const auto act = forward_pass(model, rec.features);
      const LogitVector z(act.logits);
      out.sup_loss += vanilla_loss(z, *rec.label);
      backward(model, rec.features, act, vanilla_grad(z, *rec.label).values(), scale, out.grad);
    }
    out.sup_loss *= scale;
  }

  if (!unlabeled.empty()) {
    const double scale = 1.0 / static_cast<double>(unlabeled.size());
    const bool differentiate = cfg.beta != 0.0 && cfg.method != Method::supervised_only;
    std::vector<double> x(model.inputs());
    std::vector<double> g;
    out.perturbed_logits.reserve(unlabeled.size());
    for (std::size_t s = 0; s < unlabeled.size(); ++s) {
      const auto& feats = unlabeled[s].features;
      for (std::size_t d = 0; d < x.size(); ++d) x[d] = feats[d] + targets[s].noise[d];
      const auto act = forward_pass(model, x);
      LogitVector z(act.logits);
      out.uns_loss += unsupervised_term(cfg.method, z, targets[s], cfg.use_weight, g);
      if (differentiate) backward(model, x, act, g, cfg.beta * scale, out.grad);
      out.perturbed_logits.push_back(std::move(z));
    }
    out.uns_loss *= scale;
  }
  out.total = out.sup_loss + cfg.beta * out.uns_loss;
  return out;
}

/// What the diagnostics saw for one unlabeled sample. Built from the hidden
/// label after the update has been computed.
struct SampleDiagnostic {
  std::size_t k;
  bool gt_in_set;
  CaseLabel label;
  std::optional<double> r_fuzzy;
  std::optional<double> r_vanilla;
};

struct StepMetrics {
  double sup_loss = 0.0;
  double uns_loss = 0.0;
  std::vector<SampleDiagnostic> diagnostics;
};

/// One plain SGD step. Deterministic in (cfg.seed, step).
inline StepMetrics train_step(Model& model, std::span<const SampleRecord> labeled,
                              std::span<const SampleRecord> unlabeled, const TrainConfig& cfg, std::uint64_t step) {
  ObjectiveValue obj;
  std::vector<UnlabeledTarget> targets;
  try {
    targets = prepare_targets(model, unlabeled, cfg, step);
    obj = evaluate_objective(model, labeled, unlabeled, targets, cfg);
  } catch (const Error& e) {
    if (e.code() == Errc::invalid_input) throw Error(Errc::training_diverged, e.what());
    throw;
  }
  if (!std::isfinite(obj.total)) throw Error(Errc::training_diverged, "non-finite loss");
  for (double g : obj.grad) {
    if (!std::isfinite(g)) throw Error(Errc::training_diverged, "non-finite gradient");
  }

  auto params = model.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] -= cfg.lr * obj.grad[i];
    if (!std::isfinite(params[i])) throw Error(Errc::training_diverged, "non-finite parameter after update");
  }

  StepMetrics out{obj.sup_loss, obj.uns_loss, {}};
  out.diagnostics.reserve(unlabeled.size());
  for (std::size_t s = 0; s < unlabeled.size(); ++s) {
    const auto& hidden = unlabeled[s].label;
    if (!hidden || *hidden >= cfg.C) continue;
    const auto& t = targets[s];
    const auto& z = obj.perturbed_logits[s];
    SampleDiagnostic d{t.set.k(), t.set.contains(*hidden), classify_case(t.set, t.pseudo, *hidden), {}, {}};
    try {
      d.r_fuzzy = positive_gradient_score(z, t.set, *hidden, GradientSource::fuzzy);
    } catch (const Error&) {
    }
    try {
      d.r_vanilla = positive_gradient_score(z, t.set, *hidden, GradientSource::vanilla);
    } catch (const Error&) {
    }
    out.diagnostics.push_back(d);
  }
  return out;
}

struct MetricsRow {
  std::size_t epoch = 0;
  double train_sup_loss = 0.0;
  double train_uns_loss = 0.0;
  double test_accuracy = 0.0;
  double avg_k = 0.0;
  double impurity = 0.0;
  double frac_k1 = 0.0;
  std::array<std::size_t, 3> case_counts{};
  // NaN when a case had no scored samples in the epoch.
  std::array<double, 3> mean_r_fuzzy{};
  std::array<double, 3> mean_r_vanilla{};

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

inline double accuracy(const Model& model, std::span<const SampleRecord> samples) {
  if (samples.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& rec : samples) {
    if (rec.label && pseudo_label(model, rec.features) == *rec.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

/// Assignment statistics of a frozen model over labelled-or-hidden samples.
inline AssignmentStats evaluate_assignments(const Model& model, std::span<const SampleRecord> samples, double T) {
  std::vector<FuzzyPositiveSet> sets;
  std::vector<std::size_t> gts;
  for (const auto& rec : samples) {
    if (!rec.label) continue;
    sets.push_back(assign(softmax(forward(model, rec.features)), T));
    gts.push_back(*rec.label);
  }
  return assignment_stats(sets, gts);
}

struct ExperimentResult {
  std::vector<MetricsRow> rows;
  Model model;
};

using EpochCallback = std::function<void(const MetricsRow&)>;

namespace detail {

class EpochAccumulator {
 public:
  void add_step(const StepMetrics& m) {
    sup_ += m.sup_loss;
    uns_ += m.uns_loss;
    ++steps_;
    for (const auto& d : m.diagnostics) {
      ++seen_;
      k_total_ += d.k;
      if (d.k == 1) ++k1_;
      if (!d.gt_in_set) ++missed_;
      const auto c = static_cast<std::size_t>(d.label);
      ++counts_[c];
      if (d.r_fuzzy) {
        r_fuzzy_[c] += *d.r_fuzzy;
        ++n_fuzzy_[c];
      }
      if (d.r_vanilla) {
        r_vanilla_[c] += *d.r_vanilla;
        ++n_vanilla_[c];
      }
    }
  }

  MetricsRow finish(std::size_t epoch, double test_accuracy) const {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    const auto mean = [](double sum, std::size_t n) { return n == 0 ? nan : sum / static_cast<double>(n); };
    MetricsRow row;
    row.epoch = epoch;
    row.train_sup_loss = mean(sup_, steps_);
    row.train_uns_loss = mean(uns_, steps_);
    row.test_accuracy = test_accuracy;
    row.avg_k = mean(static_cast<double>(k_total_), seen_);
    row.impurity = mean(static_cast<double>(missed_), seen_);
    row.frac_k1 = mean(static_cast<double>(k1_), seen_);
    row.case_counts = counts_;
    for (std::size_t c = 0; c < 3; ++c) {
      row.mean_r_fuzzy[c] = mean(r_fuzzy_[c], n_fuzzy_[c]);
      row.mean_r_vanilla[c] = mean(r_vanilla_[c], n_vanilla_[c]);
    }
    return row;
  }

 private:
  double sup_ = 0.0;
  double uns_ = 0.0;
  std::size_t steps_ = 0;
  std::size_t seen_ = 0;
  std::size_t k_total_ = 0;
  std::size_t k1_ = 0;
  std::size_t missed_ = 0;
  std::array<std::size_t, 3> counts_{};
  std::array<double, 3> r_fuzzy_{};
  std::array<double, 3> r_vanilla_{};
  std::array<std::size_t, 3> n_fuzzy_{};
  std::array<std::size_t, 3> n_vanilla_{};
};

}  // namespace detail

/**
 * Full training run on a given dataset. Each epoch walks the unlabeled split
 * in shuffled batches of `batch_size`; every step pairs it with the next
 * min(L, batch_size) labeled samples, cycling through a shuffled order.
 */
inline ExperimentResult run_experiment(const TrainConfig& cfg, const std::vector<SampleRecord>& data,
                                       const EpochCallback& on_epoch = {}) {
  cfg.validate();
  const auto labeled = select_split(data, Split::labeled);
  const auto unlabeled = select_split(data, Split::unlabeled);
  const auto test = select_split(data, Split::test);
  if (labeled.empty()) throw Error(Errc::invalid_config, "no labeled samples");

  ExperimentResult result{{}, Model::initialized(cfg.D, cfg.H, cfg.C, cfg.seed)};
  Model& model = result.model;

  std::vector<std::size_t> l_order(labeled.size());
  std::vector<std::size_t> u_order(unlabeled.size());
  std::iota(l_order.begin(), l_order.end(), std::size_t{0});
  const std::size_t l_batch = std::min(labeled.size(), cfg.batch_size);
  const std::size_t steps_per_epoch =
      std::max<std::size_t>(1, (unlabeled.size() + cfg.batch_size - 1) / cfg.batch_size);
  std::size_t l_cursor = 0;
  std::uint64_t step = 0;

  std::vector<SampleRecord> l_buf;
  std::vector<SampleRecord> u_buf;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    auto rng = detail::make_rng(cfg.seed, detail::Stream::shuffle, epoch);
    std::iota(u_order.begin(), u_order.end(), std::size_t{0});
    std::shuffle(u_order.begin(), u_order.end(), rng);
    std::shuffle(l_order.begin(), l_order.end(), rng);

    detail::EpochAccumulator acc;
    for (std::size_t s = 0; s < steps_per_epoch; ++s) {
      l_buf.clear();
      for (std::size_t i = 0; i < l_batch; ++i) {
        l_buf.push_back(labeled[l_order[l_cursor]]);
        l_cursor = (l_cursor + 1) % labeled.size();
      }
      u_buf.clear();
      const std::size_t begin = s * cfg.batch_size;
      const std::size_t end = std::min(unlabeled.size(), begin + cfg.batch_size);
      for (std::size_t i = begin; i < end; ++i) u_buf.push_back(unlabeled[u_order[i]]);
      try {
        acc.add_step(train_step(model, l_buf, u_buf, cfg, step++));
      } catch (const Error& e) {
        if (e.code() == Errc::training_diverged)
          throw Error(Errc::training_diverged, "epoch " + std::to_string(epoch) + ": " + e.what());
        throw;
      }
    }
    result.rows.push_back(acc.finish(epoch, accuracy(model, test)));
    if (on_epoch) on_epoch(result.rows.back());
  }
  return result;
}

inline ExperimentResult run_experiment(const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  return run_experiment(cfg, make_dataset(cfg), on_epoch);
}

}  // namespace fpl

#endif  // FPL_TRAINER_HPP_
