/*
 * Copyright 2026 fpl-lab contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef FPL_CLI_HPP_
#define FPL_CLI_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "fpl/config.hpp"
#include "fpl/dataset.hpp"
#include "fpl/diagnostics.hpp"
#include "fpl/error.hpp"
#include "fpl/io.hpp"
#include "fpl/model.hpp"
#include "fpl/selfcheck.hpp"
#include "fpl/trainer.hpp"

namespace fpl::cli {

enum class Command { train, sweep_t, diagnose, selfcheck };

struct Override {
  std::string key;
  std::string value;
  friend bool operator==(const Override&, const Override&) = default;
};

struct RunSpec {
  Command command = Command::train;
  std::string config_path;
  std::string output_dir = ".";
  std::string checkpoint_path;  // diagnose only; defaults to <output_dir>/checkpoint
  std::vector<Override> overrides;
};

struct ParseOutcome {
  std::optional<RunSpec> spec;
  int exit_code = 0;
  std::string message;
};

inline constexpr std::string_view kSweepKey = "sweep.T";
inline const std::vector<double> kDefaultSweep = {0.5, 0.75, 0.85, 0.9, 0.95, 0.99};

inline Override parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
    throw CLI::ValidationError("--set", "expected key=value, got '" + text + "'");
  Override o{text.substr(0, eq), text.substr(eq + 1)};
  const auto& keys = config_keys();
  if (o.key != kSweepKey && std::find(keys.begin(), keys.end(), o.key) == keys.end())
    throw CLI::ValidationError("--set", "unknown key '" + o.key + "'");
  return o;
}

/// `fpl-lab <command> --config PATH --out DIR [--set k=v ...]`
inline ParseOutcome parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Fuzzy positive learning lab: losses, diagnostics and toy semi-supervised runs", "fpl-lab"};
  app.require_subcommand(1);

  RunSpec spec;
  std::vector<std::string> sets;
  const auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", spec.config_path, "flat key=value config file")->check(CLI::ExistingFile);
    if (config_required) opt->required();
    sub->add_option("--out", spec.output_dir, "output directory");
    sub->add_option("--set", sets, "override a config field, key=value (repeatable)");
  };
  auto* train = app.add_subcommand("train", "run one experiment; writes metrics.csv, summary.json, checkpoint");
  add_common(train, true);
  auto* sweep = app.add_subcommand("sweep-t", "one experiment per T value; writes sweep.csv");
  add_common(sweep, true);
  auto* diagnose = app.add_subcommand("diagnose", "score a frozen checkpoint on the unlabeled split; writes cases.csv");
  add_common(diagnose, true);
  diagnose->add_option("--checkpoint", spec.checkpoint_path, "checkpoint file (default <out>/checkpoint)");
  auto* selfcheck = app.add_subcommand("selfcheck", "run the built-in invariant suite");
  add_common(selfcheck, false);

  ParseOutcome outcome;
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    for (const auto& s : sets) spec.overrides.push_back(parse_override(s));
  } catch (const CLI::ParseError& e) {
    std::ostringstream out;
    std::ostringstream err;
    outcome.exit_code = app.exit(e, out, err);
    if (outcome.exit_code == 0) {
      outcome.message = out.str();
    } else {
      outcome.message = err.str();
    }
    return outcome;
  }
  if (train->parsed()) spec.command = Command::train;
  if (sweep->parsed()) spec.command = Command::sweep_t;
  if (diagnose->parsed()) spec.command = Command::diagnose;
  if (selfcheck->parsed()) spec.command = Command::selfcheck;
  outcome.spec = std::move(spec);
  return outcome;
}

inline std::vector<double> parse_t_list(const std::string& text) {
  std::vector<double> ts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) ts.push_back(detail::parse_real(kSweepKey, detail::trim(item)));
  if (ts.empty()) throw Error(Errc::invalid_config, "empty T sweep");
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

/// Config file plus `--set` overrides; sweep.T is returned separately.
inline TrainConfig resolve_config(const RunSpec& spec, std::vector<double>* sweep = nullptr) {
  TrainConfig cfg = spec.config_path.empty() ? TrainConfig{} : load_config(spec.config_path);
  for (const auto& o : spec.overrides) {
    if (o.key == kSweepKey) {
      if (sweep) *sweep = parse_t_list(o.value);
    } else {
      apply_setting(cfg, o.key, o.value);
    }
  }
  cfg.validate();
  return cfg;
}

struct TrainOutcome {
  std::vector<MetricsRow> rows;
  bool diverged = false;
  std::string message;
};

/// Runs one experiment into `dir`. metrics.csv is written epoch by epoch so a
/// diverged run keeps its partial history.
inline TrainOutcome train_into(const TrainConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream metrics(dir / "metrics.csv", std::ios::binary);
  if (!metrics) throw Error(Errc::io_failure, "cannot write '" + (dir / "metrics.csv").string() + "'");
  metrics << io::kMetricsHeader << '\n';

  TrainOutcome outcome;
  try {
    auto result = run_experiment(cfg, [&](const MetricsRow& row) {
      io::write_metrics_row(metrics, row);
      metrics.flush();
      outcome.rows.push_back(row);
    });
    io::save_checkpoint(dir / "checkpoint", result.model);
  } catch (const Error& e) {
    if (e.code() != Errc::training_diverged) throw;
    outcome.diverged = true;
    outcome.message = e.what();
  }
  if (!metrics) throw Error(Errc::io_failure, "short write to metrics.csv");
  io::write_text(dir / "summary.json",
                 io::make_summary(cfg, outcome.rows, outcome.diverged ? "diverged" : "ok", outcome.message).dump(2) +
                     "\n");
  return outcome;
}

inline int run_train(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  const auto cfg = resolve_config(spec);
  const auto outcome = train_into(cfg, spec.output_dir);
  if (outcome.diverged) {
    err << "fpl-lab: " << outcome.message << '\n';
    return 3;
  }
  const auto& last = outcome.rows.back();
  out << fmt::format("trained {} epochs, method={}, test_accuracy={:.4f}, avg_k={:.4f}, impurity={:.4f}\n",
                     outcome.rows.size(), to_string(cfg.method), last.test_accuracy, last.avg_k, last.impurity);
  return 0;
}

inline std::string t_dir_name(double T) { return fmt::format("T_{}", T); }

inline int run_sweep(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  std::vector<double> ts = kDefaultSweep;
  const auto base = resolve_config(spec, &ts);
  const std::filesystem::path root(spec.output_dir);
  std::filesystem::create_directories(root);

  // Runs share nothing mutable; each writes its own subdirectory.
  std::vector<std::future<TrainOutcome>> jobs;
  for (double T : ts) {
    TrainConfig cfg = base;
    cfg.T = T;
    cfg.validate();
    jobs.push_back(std::async(std::launch::async, [cfg, dir = root / t_dir_name(T)] { return train_into(cfg, dir); }));
  }

  std::ostringstream csv;
  csv << "T,final_accuracy,final_avg_k,final_impurity\n";
  int status = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const auto outcome = jobs[i].get();
    if (outcome.diverged) {
      err << "fpl-lab: T=" << ts[i] << ": " << outcome.message << '\n';
      status = 3;
    }
    if (outcome.rows.empty()) continue;
    const auto& last = outcome.rows.back();
    csv << io::format_real(ts[i]) << ',' << io::format_real(last.test_accuracy) << ','
        << io::format_real(last.avg_k) << ',' << io::format_real(last.impurity) << '\n';
    out << fmt::format("T={:<5} accuracy={:.4f} avg_k={:.4f} impurity={:.4f}\n", ts[i], last.test_accuracy,
                       last.avg_k, last.impurity);
  }
  io::write_text(root / "sweep.csv", csv.str());
  return status;
}

inline int run_diagnose(const RunSpec& spec, std::ostream& out, std::ostream&) {
  const auto cfg = resolve_config(spec);
  const std::filesystem::path root(spec.output_dir);
  const auto ckpt = spec.checkpoint_path.empty() ? root / "checkpoint" : std::filesystem::path(spec.checkpoint_path);
  const Model model = io::load_checkpoint(ckpt);
  if (model.inputs() != cfg.D || model.classes() != cfg.C)
    throw Error(Errc::invalid_config, "checkpoint shape does not match the config");
  std::filesystem::create_directories(root);

  const auto unlabeled = select_split(make_dataset(cfg), Split::unlabeled);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const auto guarded = [](auto&& f) {
    try {
      return f();
    } catch (const Error&) {
      return nan;
    }
  };

  std::ostringstream csv;
  csv << "index,gt,pseudo,k,case,r_fuzzy,r_vanilla,excluded_mass,cos_ideal_fuzzy,cos_ideal_vanilla,"
         "norm_fuzzy,norm_ideal\n";
  std::vector<ProbDist> probs;
  std::vector<FuzzyPositiveSet> sets;
  std::vector<std::size_t> gts;
  std::array<double, 3> sum_rf{}, sum_rv{};
  std::array<std::size_t, 3> n_rf{}, n_rv{}, counts{};
  for (std::size_t s = 0; s < unlabeled.size(); ++s) {
    const auto z = forward(model, unlabeled[s].features);
    const auto p = softmax(z);
    const auto Y = assign(p, cfg.T);
    const std::size_t gt = *unlabeled[s].label;
    const auto label = classify_case(Y, Y.top1(), gt);
    const double rf = guarded([&] { return positive_gradient_score(z, Y, gt, GradientSource::fuzzy); });
    const double rv = guarded([&] { return positive_gradient_score(z, Y, gt, GradientSource::vanilla); });
    const auto gi = ideal_gradient(z, gt);
    const auto gf = fuzzy_grad(z, Y);
    const auto gv = vanilla_grad(z, Y.top1());
    double excluded = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
      if (!Y.contains(c)) excluded += p[c];
    }
    const auto ci = static_cast<std::size_t>(label);
    ++counts[ci];
    if (std::isfinite(rf)) {
      sum_rf[ci] += rf;
      ++n_rf[ci];
    }
    if (std::isfinite(rv)) {
      sum_rv[ci] += rv;
      ++n_rv[ci];
    }
    csv << s << ',' << gt << ',' << Y.top1() << ',' << Y.k() << ',' << case_number(label) << ','
        << io::format_real(rf) << ',' << io::format_real(rv) << ',' << io::format_real(excluded) << ','
        << io::format_real(guarded([&] { return cosine_similarity(gi, gf); })) << ','
        << io::format_real(guarded([&] { return cosine_similarity(gi, gv); })) << ',' << io::format_real(gf.norm())
        << ',' << io::format_real(gi.norm()) << '\n';
    probs.push_back(p);
    sets.push_back(Y);
    gts.push_back(gt);
  }
  io::write_text(root / "cases.csv", csv.str());

  const auto stats = assignment_stats(sets, gts);
  const auto vanish = vanishing_stats(probs, cfg.T);
  out << fmt::format("samples={} T={} avg_k={:.4f} impurity={:.4f} frac_k1={:.4f}\n", sets.size(), cfg.T,
                     stats.avg_k, stats.impurity, stats.frac_k1);
  for (std::size_t c = 0; c < 3; ++c) {
    out << fmt::format("case{}: count={} mean_r_fuzzy={:.4f} mean_r_vanilla={:.4f}\n", c + 1, counts[c],
                       n_rf[c] ? sum_rf[c] / static_cast<double>(n_rf[c]) : nan,
                       n_rv[c] ? sum_rv[c] / static_cast<double>(n_rv[c]) : nan);
  }
  out << fmt::format("excluded mass: min={:.6g} mean={:.6g}, bound violations={} of {}\n", vanish.min_mass,
                     vanish.mean_mass, vanish.violations, vanish.bounded);
  return 0;
}

inline int run_selfcheck_command(const RunSpec& spec, std::ostream& out, std::ostream&) {
  std::uint64_t seed = 7;
  if (!spec.config_path.empty() || !spec.overrides.empty()) seed = resolve_config(spec).seed;
  bool all = true;
  for (const auto& r : run_selfcheck(seed)) {
    out << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.cases << " cases)";
    if (!r.detail.empty()) out << ": " << r.detail;
    out << '\n';
    all = all && r.passed;
  }
  out << (all ? "all invariants hold\n" : "invariant violations found\n");
  return all ? 0 : 1;
}

/// Executes a parsed command. Library errors become a message and exit status 2
/// (3 for a diverged training run).
inline int run(const RunSpec& spec, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    switch (spec.command) {
      case Command::train: return run_train(spec, out, err);
      case Command::sweep_t: return run_sweep(spec, out, err);
      case Command::diagnose: return run_diagnose(spec, out, err);
      case Command::selfcheck: return run_selfcheck_command(spec, out, err);
    }
  } catch (const Error& e) {
    err << "fpl-lab: " << e.what() << '\n';
    return e.code() == Errc::training_diverged ? 3 : 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "fpl-lab: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "fpl-lab: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace fpl::cli

#endif  // FPL_CLI_HPP_
