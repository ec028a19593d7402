/*
 * Copyright 2026 fpl-lab contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef FPL_CONFIG_HPP_
#define FPL_CONFIG_HPP_

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fpl/error.hpp"

namespace fpl {

enum class Method { fpl, vanilla, negative, soft, supervised_only };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::fpl: return "fpl";
    case Method::vanilla: return "vanilla";
    case Method::negative: return "negative";
    case Method::soft: return "soft";
    case Method::supervised_only: return "supervised-only";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  if (s == "fpl") return Method::fpl;
  if (s == "vanilla") return Method::vanilla;
  if (s == "negative") return Method::negative;
  if (s == "soft") return Method::soft;
  if (s == "supervised-only") return Method::supervised_only;
  throw Error(Errc::invalid_config, "unknown method '" + std::string(s) + "'");
}

struct TrainConfig {
  std::uint64_t seed = 1;
  std::size_t C = 4;
  std::size_t D = 2;
  std::size_t H = 16;
  std::size_t L = 16;
  std::size_t U = 800;
  double T = 0.9;
  double A = 50.0;
  double beta = 1.0;
  double noise_sigma = 0.5;
  double lr = 0.1;
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  Method method = Method::fpl;
  // Applies the per-sample adaptive weight to the fuzzy loss.
  bool use_weight = true;
  // Blob geometry, in units of the blob standard deviation.
  double blob_sigma = 1.0;
  double separation = 6.0;
  double confusable_separation = 1.5;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;

  void validate() const {
    if (C < 2) throw Error(Errc::invalid_config, "C must be at least 2");
    if (D < 2) throw Error(Errc::invalid_config, "D must be at least 2");
    if (H < 1) throw Error(Errc::invalid_config, "H must be at least 1");
    if (L < 1) throw Error(Errc::invalid_config, "L must be at least 1");
    if (epochs < 1) throw Error(Errc::invalid_config, "epochs must be at least 1");
    if (batch_size < 1) throw Error(Errc::invalid_config, "batch_size must be at least 1");
    if (!(T > 0.0 && T < 1.0)) throw Error(Errc::invalid_config, "T must lie in (0, 1)");
    if (!(A > 0.0) || !std::isfinite(A)) throw Error(Errc::invalid_config, "A must be positive");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error(Errc::invalid_config, "beta must be non-negative");
    if (!(lr > 0.0) || !std::isfinite(lr)) throw Error(Errc::invalid_config, "lr must be positive");
    if (!(noise_sigma >= 0.0)) throw Error(Errc::invalid_config, "noise_sigma must be non-negative");
    if (!(blob_sigma > 0.0)) throw Error(Errc::invalid_config, "blob_sigma must be positive");
  }
};

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "seed", "C",          "D",          "H",        "L",          "U",          "T",
      "A",    "beta",       "noise_sigma", "lr",      "epochs",     "batch_size", "method",
      "use_weight", "blob_sigma", "separation", "confusable_separation"};
  return keys;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename Int>
Int parse_integer(std::string_view key, std::string_view value) {
  Int out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end)
    throw Error(Errc::invalid_config, "bad integer for " + std::string(key) + ": '" + std::string(value) + "'");
  return out;
}

inline double parse_real(std::string_view key, std::string_view value) {
  const std::string text(value);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw Error(Errc::invalid_config, "bad number for " + std::string(key) + ": '" + text + "'");
  return out;
}

inline bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw Error(Errc::invalid_config, "bad boolean for " + std::string(key) + ": '" + std::string(value) + "'");
}

}  // namespace detail

inline void apply_setting(TrainConfig& cfg, std::string_view raw_key, std::string_view raw_value) {
  const auto key = detail::trim(raw_key);
  const auto value = detail::trim(raw_value);
  using detail::parse_integer;
  using detail::parse_real;
  if (key == "seed") cfg.seed = parse_integer<std::uint64_t>(key, value);
  else if (key == "C") cfg.C = parse_integer<std::size_t>(key, value);
  else if (key == "D") cfg.D = parse_integer<std::size_t>(key, value);
  else if (key == "H") cfg.H = parse_integer<std::size_t>(key, value);
  else if (key == "L") cfg.L = parse_integer<std::size_t>(key, value);
  else if (key == "U") cfg.U = parse_integer<std::size_t>(key, value);
  else if (key == "T") cfg.T = parse_real(key, value);
  else if (key == "A") cfg.A = parse_real(key, value);
  else if (key == "beta") cfg.beta = parse_real(key, value);
  else if (key == "noise_sigma") cfg.noise_sigma = parse_real(key, value);
  else if (key == "lr") cfg.lr = parse_real(key, value);
  else if (key == "epochs") cfg.epochs = parse_integer<std::size_t>(key, value);
  else if (key == "batch_size") cfg.batch_size = parse_integer<std::size_t>(key, value);
  else if (key == "method") cfg.method = parse_method(value);
  else if (key == "use_weight") cfg.use_weight = detail::parse_bool(key, value);
  else if (key == "blob_sigma") cfg.blob_sigma = parse_real(key, value);
  else if (key == "separation") cfg.separation = parse_real(key, value);
  else if (key == "confusable_separation") cfg.confusable_separation = parse_real(key, value);
  else throw Error(Errc::invalid_config, "unknown config key '" + std::string(key) + "'");
}

/// Flat `key = value` text, one setting per line; `#` starts a comment.
inline TrainConfig parse_config(std::istream& in) {
  TrainConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = detail::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::invalid_config, "line " + std::to_string(line_no) + ": expected key = value");
    apply_setting(cfg, view.substr(0, eq), view.substr(eq + 1));
  }
  return cfg;
}

inline TrainConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_failure, "cannot read config '" + path + "'");
  return parse_config(in);
}

}  // namespace fpl

#endif  // FPL_CONFIG_HPP_
