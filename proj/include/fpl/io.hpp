/*
 * Copyright 2026 fpl-lab contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef FPL_IO_HPP_
#define FPL_IO_HPP_

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "fpl/config.hpp"
#include "fpl/error.hpp"
#include "fpl/model.hpp"
#include "fpl/trainer.hpp"

namespace fpl::io {

/// Fixed 15-significant-digit rendering used by every CSV file.
inline std::string format_real(double v) { return fmt::format("{:.15g}", v); }

inline constexpr std::string_view kMetricsHeader =
    "epoch,train_sup_loss,train_uns_loss,test_accuracy,avg_k,impurity,frac_k1,"
    "case1_count,case2_count,case3_count,"
    "case1_r_fuzzy,case2_r_fuzzy,case3_r_fuzzy,"
    "case1_r_vanilla,case2_r_vanilla,case3_r_vanilla";

inline void write_metrics_row(std::ostream& out, const MetricsRow& r) {
  out << r.epoch << ',' << format_real(r.train_sup_loss) << ',' << format_real(r.train_uns_loss) << ','
      << format_real(r.test_accuracy) << ',' << format_real(r.avg_k) << ',' << format_real(r.impurity) << ','
      << format_real(r.frac_k1);
  for (auto n : r.case_counts) out << ',' << n;
  for (double v : r.mean_r_fuzzy) out << ',' << format_real(v);
  for (double v : r.mean_r_vanilla) out << ',' << format_real(v);
  out << '\n';
}

inline void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) write_metrics_row(out, r);
}

inline nlohmann::json real_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

inline nlohmann::json to_json(const TrainConfig& cfg) {
  return {{"seed", cfg.seed},
          {"C", cfg.C},
          {"D", cfg.D},
          {"H", cfg.H},
          {"L", cfg.L},
          {"U", cfg.U},
          {"T", cfg.T},
          {"A", cfg.A},
          {"beta", cfg.beta},
          {"noise_sigma", cfg.noise_sigma},
          {"lr", cfg.lr},
          {"epochs", cfg.epochs},
          {"batch_size", cfg.batch_size},
          {"method", to_string(cfg.method)},
          {"use_weight", cfg.use_weight},
          {"blob_sigma", cfg.blob_sigma},
          {"separation", cfg.separation},
          {"confusable_separation", cfg.confusable_separation}};
}

inline nlohmann::json to_json(const MetricsRow& r) {
  nlohmann::json j = {{"epoch", r.epoch},
                      {"train_sup_loss", real_or_null(r.train_sup_loss)},
                      {"train_uns_loss", real_or_null(r.train_uns_loss)},
                      {"test_accuracy", real_or_null(r.test_accuracy)},
                      {"avg_k", real_or_null(r.avg_k)},
                      {"impurity", real_or_null(r.impurity)},
                      {"frac_k1", real_or_null(r.frac_k1)},
                      {"case_counts", r.case_counts}};
  j["mean_r_fuzzy"] = nlohmann::json::array();
  j["mean_r_vanilla"] = nlohmann::json::array();
  for (std::size_t c = 0; c < 3; ++c) {
    j["mean_r_fuzzy"].push_back(real_or_null(r.mean_r_fuzzy[c]));
    j["mean_r_vanilla"].push_back(real_or_null(r.mean_r_vanilla[c]));
  }
  return j;
}

inline nlohmann::json make_summary(const TrainConfig& cfg, const std::vector<MetricsRow>& rows,
                                   std::string_view status, std::string_view message = {}) {
  nlohmann::json j = {{"config", to_json(cfg)},
                      {"status", status},
                      {"epochs_completed", rows.size()},
                      {"final", rows.empty() ? nlohmann::json(nullptr) : to_json(rows.back())}};
  if (!message.empty()) j["message"] = message;
  return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_failure, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(Errc::io_failure, "short write to '" + path.string() + "'");
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_failure, "cannot read '" + path.string() + "'");
  return nlohmann::json::parse(in);
}

// Checkpoint: four header lines (inputs, hidden, classes, parameter count),
// then one parameter per line in Model's flat layout.

inline void save_checkpoint(std::ostream& out, const Model& model) {
  out << "inputs " << model.inputs() << '\n'
      << "hidden " << model.hidden() << '\n'
      << "classes " << model.classes() << '\n'
      << "parameters " << model.parameter_count() << '\n';
  for (double v : model.parameters()) out << fmt::format("{:.17g}", v) << '\n';
}

inline Model load_checkpoint(std::istream& in) {
  const auto field = [&](std::string_view name) {
    std::string key;
    std::size_t value = 0;
    if (!(in >> key >> value) || key != name)
      throw Error(Errc::io_failure, "checkpoint header: expected '" + std::string(name) + "'");
    return value;
  };
  const std::size_t D = field("inputs");
  const std::size_t H = field("hidden");
  const std::size_t C = field("classes");
  const std::size_t n = field("parameters");
  Model model(D, H, C);
  if (n != model.parameter_count()) throw Error(Errc::io_failure, "checkpoint parameter count does not match shape");
  for (double& v : model.parameters()) {
    std::string token;
    if (!(in >> token)) throw Error(Errc::io_failure, "checkpoint truncated");
    v = detail::parse_real("checkpoint value", token);
  }
  return model;
}

inline void save_checkpoint(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_failure, "cannot write '" + path.string() + "'");
  save_checkpoint(out, model);
}

inline Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_failure, "cannot read checkpoint '" + path.string() + "'");
  return load_checkpoint(in);
}

}  // namespace fpl::io

#endif  // FPL_IO_HPP_
