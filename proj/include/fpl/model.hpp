/*
 * Copyright 2026 fpl-lab contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef FPL_MODEL_HPP_
#define FPL_MODEL_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fpl/dataset.hpp"
#include "fpl/error.hpp"
#include "fpl/numerics.hpp"

namespace fpl {

/**
 * One-hidden-layer tanh network, z = W2^T tanh(W1^T x + b1) + b2.
 *
 * All parameters live in one flat buffer, laid out as W1 (D x H, row-major),
 * b1 (H), W2 (H x C, row-major), b2 (C). Gradients use the same layout.
 */
class Model {
 public:
  Model(std::size_t inputs, std::size_t hidden, std::size_t classes)
      : D_(inputs), H_(hidden), C_(classes), params_(inputs * hidden + hidden + hidden * classes + classes, 0.0) {}

  /// Uniform Glorot initialisation, biases zero.
  static Model initialized(std::size_t inputs, std::size_t hidden, std::size_t classes, std::uint64_t seed) {
    Model m(inputs, hidden, classes);
    auto rng = detail::make_rng(seed, detail::Stream::init);
    const double r1 = std::sqrt(6.0 / static_cast<double>(inputs + hidden));
    const double r2 = std::sqrt(6.0 / static_cast<double>(hidden + classes));
    std::uniform_real_distribution<double> u1(-r1, r1);
    std::uniform_real_distribution<double> u2(-r2, r2);
    for (std::size_t i = 0; i < inputs * hidden; ++i) m.params_[i] = u1(rng);
    for (std::size_t i = 0; i < hidden * classes; ++i) m.params_[m.w2_offset() + i] = u2(rng);
    return m;
  }

  std::size_t inputs() const noexcept { return D_; }
  std::size_t hidden() const noexcept { return H_; }
  std::size_t classes() const noexcept { return C_; }

  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  double& w1(std::size_t d, std::size_t h) { return params_[d * H_ + h]; }
  double& b1(std::size_t h) { return params_[b1_offset() + h]; }
  double& w2(std::size_t h, std::size_t c) { return params_[w2_offset() + h * C_ + c]; }
  double& b2(std::size_t c) { return params_[b2_offset() + c]; }
  double w1(std::size_t d, std::size_t h) const { return params_[d * H_ + h]; }
  double b1(std::size_t h) const { return params_[b1_offset() + h]; }
  double w2(std::size_t h, std::size_t c) const { return params_[w2_offset() + h * C_ + c]; }
  double b2(std::size_t c) const { return params_[b2_offset() + c]; }

  std::size_t b1_offset() const noexcept { return D_ * H_; }
  std::size_t w2_offset() const noexcept { return D_ * H_ + H_; }
  std::size_t b2_offset() const noexcept { return D_ * H_ + H_ + H_ * C_; }

  friend bool operator==(const Model&, const Model&) = default;

 private:
  std::size_t D_;
  std::size_t H_;
  std::size_t C_;
  std::vector<double> params_;
};

/// Hidden activations and raw logits of one forward pass, kept for backprop.
struct Activations {
  std::vector<double> hidden;
  std::vector<double> logits;
};

inline Activations forward_pass(const Model& model, std::span<const double> x) {
  if (x.size() != model.inputs()) throw Error(Errc::invalid_input, "feature dimension does not match the model");
  Activations a;
  a.hidden.resize(model.hidden());
  for (std::size_t h = 0; h < model.hidden(); ++h) {
    double acc = model.b1(h);
    for (std::size_t d = 0; d < model.inputs(); ++d) acc += model.w1(d, h) * x[d];
    a.hidden[h] = std::tanh(acc);
  }
  a.logits.resize(model.classes());
  for (std::size_t c = 0; c < model.classes(); ++c) {
    double acc = model.b2(c);
    for (std::size_t h = 0; h < model.hidden(); ++h) acc += model.w2(h, c) * a.hidden[h];
    a.logits[c] = acc;
  }
  return a;
}

inline LogitVector forward(const Model& model, std::span<const double> x) {
  return LogitVector(forward_pass(model, x).logits);
}

/// Accumulates scale * dL/dtheta into `grad`, given dL/dz for the pass `a` on input `x`.
inline void backward(const Model& model, std::span<const double> x, const Activations& a,
                     std::span<const double> dlogits, double scale, std::span<double> grad) {
  const std::size_t H = model.hidden();
  const std::size_t C = model.classes();
  std::vector<double> dhidden(H, 0.0);
  for (std::size_t h = 0; h < H; ++h) {
    double back = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      grad[model.w2_offset() + h * C + c] += scale * dlogits[c] * a.hidden[h];
      back += model.w2(h, c) * dlogits[c];
    }
    dhidden[h] = back * (1.0 - a.hidden[h] * a.hidden[h]);
  }
  for (std::size_t c = 0; c < C; ++c) grad[model.b2_offset() + c] += scale * dlogits[c];
  for (std::size_t h = 0; h < H; ++h) {
    grad[model.b1_offset() + h] += scale * dhidden[h];
    for (std::size_t d = 0; d < model.inputs(); ++d) grad[d * H + h] += scale * dhidden[h] * x[d];
  }
}

/// Argmax of the clean logits; ties go to the smaller class index.
inline std::size_t pseudo_label(const Model& model, std::span<const double> x) {
  return argmax(forward_pass(model, x).logits);
}

}  // namespace fpl

#endif  // FPL_MODEL_HPP_
