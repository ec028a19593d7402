/*
 * Copyright 2026 fpl-lab contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fpl/cli.hpp"

using namespace fpl;
namespace fs = std::filesystem;

namespace {

const std::string kConfig = std::string(FPL_SOURCE_DIR) + "/configs/default.cfg";

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("fpl_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream ss(text);
  for (std::string line; std::getline(ss, line);) lines.push_back(line);
  return lines;
}

int run_cli(const std::vector<std::string>& args, std::string* out_text = nullptr) {
  const auto parsed = cli::parse_args(args);
  if (!parsed.spec) return parsed.exit_code;
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(*parsed.spec, out, err);
  if (out_text) *out_text = out.str();
  return code;
}

}  // namespace

TEST(ParseArgs, TrainWithOverrides) {
  const auto r = cli::parse_args({"train", "--config", kConfig, "--out", "runs/a", "--set", "T=0.95", "--set",
                                  "method=vanilla"});
  ASSERT_TRUE(r.spec);
  EXPECT_EQ(r.spec->command, cli::Command::train);
  EXPECT_EQ(r.spec->config_path, kConfig);
  EXPECT_EQ(r.spec->output_dir, "runs/a");
  EXPECT_EQ(r.spec->overrides, (std::vector<cli::Override>{{"T", "0.95"}, {"method", "vanilla"}}));
  const auto cfg = cli::resolve_config(*r.spec);
  EXPECT_EQ(cfg.T, 0.95);
  EXPECT_EQ(cfg.method, Method::vanilla);
}

TEST(ParseArgs, HelpAndErrors) {
  const auto help = cli::parse_args({"--help"});
  EXPECT_FALSE(help.spec);
  EXPECT_EQ(help.exit_code, 0);
  EXPECT_NE(help.message.find("sweep-t"), std::string::npos);

  EXPECT_NE(cli::parse_args({}).exit_code, 0);
  EXPECT_NE(cli::parse_args({"train", "--config", kConfig, "--bogus"}).exit_code, 0);
  EXPECT_NE(cli::parse_args({"train"}).exit_code, 0);
  EXPECT_NE(cli::parse_args({"train", "--config", "/nonexistent/x.cfg"}).exit_code, 0);
  EXPECT_NE(cli::parse_args({"train", "--config", kConfig, "--set", "T"}).exit_code, 0);
  EXPECT_NE(cli::parse_args({"train", "--config", kConfig, "--set", "nope=1"}).exit_code, 0);
  EXPECT_TRUE(cli::parse_args({"selfcheck"}).spec);
}

TEST(ParseArgs, InvalidValuesFailAtRun) {
  EXPECT_EQ(run_cli({"train", "--config", kConfig, "--out", fresh_dir("bad").string(), "--set", "T=1.5"}), 2);
  EXPECT_EQ(run_cli({"train", "--config", kConfig, "--out", fresh_dir("bad").string(), "--set", "method=x"}), 2);
}

TEST(ParseTList, SortsAndDeduplicates) {
  EXPECT_EQ(cli::parse_t_list("0.9, 0.5,0.9"), (std::vector<double>{0.5, 0.9}));
  EXPECT_THROW(cli::parse_t_list("0.5,abc"), Error);
}

TEST(Config, FileParsing) {
  std::istringstream in("# comment\nseed = 4\nmethod=soft\n\nuse_weight=false\n");
  const auto cfg = parse_config(in);
  EXPECT_EQ(cfg.seed, 4u);
  EXPECT_EQ(cfg.method, Method::soft);
  EXPECT_FALSE(cfg.use_weight);
  std::istringstream bad("seed=4\nunknown=1\n");
  EXPECT_THROW(parse_config(bad), Error);
  std::istringstream junk("seed=4x\n");
  EXPECT_THROW(parse_config(junk), Error);
  EXPECT_EQ(load_config(kConfig), TrainConfig{});
}

TEST(Train, OutputsAreDeterministicAndRoundTrip) {
  const auto a = fresh_dir("train_a");
  const auto b = fresh_dir("train_b");
  const std::vector<std::string> tail{"--config", kConfig, "--set", "epochs=4", "--set", "U=200"};
  auto args_a = std::vector<std::string>{"train", "--out", a.string()};
  auto args_b = std::vector<std::string>{"train", "--out", b.string()};
  args_a.insert(args_a.end(), tail.begin(), tail.end());
  args_b.insert(args_b.end(), tail.begin(), tail.end());
  ASSERT_EQ(run_cli(args_a), 0);
  ASSERT_EQ(run_cli(args_b), 0);

  const auto metrics = slurp(a / "metrics.csv");
  EXPECT_EQ(metrics, slurp(b / "metrics.csv"));
  const auto lines = lines_of(metrics);
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], io::kMetricsHeader);

  const auto summary = io::read_json(a / "summary.json");
  EXPECT_EQ(summary["status"], "ok");
  EXPECT_EQ(summary["epochs_completed"], 4);
  EXPECT_EQ(summary["config"]["U"], 200);
  EXPECT_EQ(summary["config"]["method"], "fpl");

  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.U = 200;
  const auto direct = run_experiment(cfg);
  const Model loaded = io::load_checkpoint(a / "checkpoint");
  EXPECT_TRUE(loaded == direct.model);
  std::ostringstream csv;
  io::write_metrics_csv(csv, direct.rows);
  EXPECT_EQ(csv.str(), metrics);
  EXPECT_DOUBLE_EQ(summary["final"]["test_accuracy"].get<double>(), direct.rows.back().test_accuracy);
}

TEST(Train, DivergedRunKeepsPartialHistory) {
  const auto dir = fresh_dir("diverged");
  EXPECT_EQ(run_cli({"train", "--config", kConfig, "--out", dir.string(), "--set", "lr=1e308"}), 3);
  EXPECT_EQ(io::read_json(dir / "summary.json")["status"], "diverged");
  EXPECT_TRUE(fs::exists(dir / "metrics.csv"));
  EXPECT_FALSE(fs::exists(dir / "checkpoint"));
}

TEST(Checkpoint, StreamRoundTripAndErrors) {
  const Model m = Model::initialized(2, 5, 3, 11);
  std::stringstream ss;
  io::save_checkpoint(ss, m);
  EXPECT_TRUE(io::load_checkpoint(ss) == m);
  std::istringstream truncated("inputs 2\nhidden 5\nclasses 3\nparameters 33\n0.5\n");
  EXPECT_THROW(io::load_checkpoint(truncated), Error);
  std::istringstream garbage("hello\n");
  EXPECT_THROW(io::load_checkpoint(garbage), Error);
}

TEST(SweepT, WritesOneRowPerT) {
  const auto dir = fresh_dir("sweep");
  std::string out;
  ASSERT_EQ(run_cli({"sweep-t", "--config", kConfig, "--out", dir.string(), "--set", "sweep.T=0.99,0.5,0.9"}, &out),
            0);
  const auto lines = lines_of(slurp(dir / "sweep.csv"));
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "T,final_accuracy,final_avg_k,final_impurity");
  EXPECT_EQ(lines[1].rfind("0.5,", 0), 0u);
  EXPECT_EQ(lines[3].rfind("0.99,", 0), 0u);
  for (double T : {0.5, 0.9, 0.99}) EXPECT_TRUE(fs::exists(dir / cli::t_dir_name(T) / "metrics.csv"));
}

TEST(Diagnose, ScoresCheckpoint) {
  const auto dir = fresh_dir("diagnose");
  ASSERT_EQ(run_cli({"train", "--config", kConfig, "--out", dir.string(), "--set", "epochs=2"}), 0);
  std::string out;
  ASSERT_EQ(run_cli({"diagnose", "--config", kConfig, "--out", dir.string()}, &out), 0);
  const auto lines = lines_of(slurp(dir / "cases.csv"));
  ASSERT_EQ(lines.size(), TrainConfig{}.U + 1);
  EXPECT_EQ(lines[0].rfind("index,gt,pseudo,k,case,", 0), 0u);
  EXPECT_NE(out.find("bound violations=0"), std::string::npos);

  EXPECT_EQ(run_cli({"diagnose", "--config", kConfig, "--out", dir.string(), "--set", "C=5"}), 2);
  EXPECT_EQ(run_cli({"diagnose", "--config", kConfig, "--out", fresh_dir("missing").string()}), 2);
}

TEST(Selfcheck, AllInvariantsHold) {
  std::string out;
  EXPECT_EQ(run_cli({"selfcheck"}, &out), 0);
  EXPECT_NE(out.find("all invariants hold"), std::string::npos);
  EXPECT_EQ(out.find("[FAIL]"), std::string::npos);
}
