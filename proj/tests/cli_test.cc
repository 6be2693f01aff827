/*
 * Copyright 2026 The predmat Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "predmat/cli.h"
#include "test_util.h"

namespace predmat::cli {
namespace {

using nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result RunCli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path Write(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testutil::ScratchDir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    uniform_ = Write(dir_ / "uniform.csv", "0.5,0.5\n0.5,0.5\n0.5,0.5\n0.5,0.5\n").string();
    onehot_ = Write(dir_ / "onehot.csv", "1,0\n1,0\n0,1\n0,1\n").string();
  }
  std::filesystem::path dir_;
  std::string uniform_, onehot_;
};

TEST_F(CliTest, MetricsClosedFormUniform) {
  const auto r = RunCli({"metrics", "--preds", uniform_});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = json::parse(r.out);
  const auto& m = report["metrics"];
  EXPECT_NEAR(m["conf_score"].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(m["class_entropy"].get<double>(), std::log(2.0), 1e-12);
  EXPECT_NEAR(m["nuclear_norm"].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(m["im"].get<double>(), 0.0, 1e-12);
  EXPECT_FALSE(m.contains("atc"));
  EXPECT_FALSE(m.contains("avg_energy"));
  EXPECT_EQ(report["schema_version"], 1);
  EXPECT_EQ(report["tool"], "predmat");
  EXPECT_EQ(report["n"], 4);
  EXPECT_EQ(report["k"], 2);
  EXPECT_EQ(report["provenance"]["cot_solver"], "exact");
  EXPECT_EQ(report["provenance"]["prior_origin"], "uniform");
  EXPECT_EQ(report["provenance"]["logits_reconstructed"], false);
  EXPECT_TRUE(report["config"].contains("energy_temperature") ||
              report["config"].contains("options"));
}

TEST_F(CliTest, MetricsClosedFormBalancedOneHot) {
  const auto r = RunCli({"metrics", "--preds", onehot_});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = json::parse(r.out)["metrics"];
  EXPECT_NEAR(m["nuclear_norm"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(m["im"].get<double>(), std::log(2.0), 1e-12);
  EXPECT_NEAR(m["softmax_corr"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(m["cot"].get<double>(), 0.0, 1e-12);
}

TEST_F(CliTest, AtcWithoutValidationIsConfigError) {
  const auto r = RunCli({"metrics", "--preds", uniform_, "--metrics", "atc"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--val-preds"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("--val-labels"), std::string::npos) << r.err;
}

TEST_F(CliTest, ValidationAndReconstructionInputs) {
  const auto labels = Write(dir_ / "labels.csv", "0\n0\n1\n1\n").string();
  const auto r = RunCli({"metrics", "--preds", uniform_, "--metrics", "atc,doc,mano",
                         "--val-preds", onehot_, "--val-labels", labels, "--reconstruct-logits"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = json::parse(r.out);
  EXPECT_NEAR(report["metrics"]["atc"].get<double>(), 0.0, 1e-12);
  EXPECT_NEAR(report["metrics"]["doc"].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(report["metrics"]["mano"].get<double>(), 0.5, 1e-9);
  EXPECT_EQ(report["provenance"]["logits_reconstructed"], true);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(RunCli({"--help"}).code, 0);
  EXPECT_EQ(RunCli({"--version"}).code, 0);
  EXPECT_EQ(RunCli({}).code, 2);
  EXPECT_EQ(RunCli({"metrics"}).code, 2);
  EXPECT_EQ(RunCli({"metrics", "--preds", uniform_, "--bogus"}).code, 2);
  EXPECT_EQ(RunCli({"metrics", "--preds", uniform_, "--metrics", "nope"}).code, 2);
  EXPECT_EQ(RunCli({"metrics", "--preds", (dir_ / "missing.csv").string()}).code, 3);
  const auto bad = Write(dir_ / "bad.csv", "0.6,0.6\n").string();
  const auto r = RunCli({"metrics", "--preds", bad});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find(":1:"), std::string::npos) << r.err;
}

TEST_F(CliTest, NumericalFailureExitCode) {
  const auto soft = Write(dir_ / "soft.csv", "0.7,0.2,0.1\n0.6,0.3,0.1\n0.5,0.4,0.1\n0.8,0.1,0.1\n");
  // The entropic kernel underflows completely, so the solver cannot converge.
  const auto r = RunCli({"metrics", "--preds", soft.string(), "--metrics", "cot", "--cot-solver",
                         "entropic", "--cot-epsilon", "1e-300"});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("no convergence"), std::string::npos) << r.err;
}

TEST_F(CliTest, ConfigFilePrecedence) {
  const auto toml = Write(dir_ / "run.toml", "metrics = [\"conf_score\", \"im\"]\n").string();
  auto r = RunCli({"--config", toml, "metrics", "--preds", uniform_});
  ASSERT_EQ(r.code, 0) << r.err;
  auto m = json::parse(r.out)["metrics"];
  EXPECT_EQ(m.size(), 2u);
  // Explicit flags beat the file.
  r = RunCli({"--config", toml, "metrics", "--preds", uniform_, "--metrics", "cot"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["metrics"].size(), 1u);
  // JSON documents work too, with underscores in keys.
  const auto js = Write(dir_ / "run.json", R"({"metrics": "nuclear_norm", "cot_aggregation": "max"})")
                      .string();
  r = RunCli({"--config", js, "metrics", "--preds", uniform_});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["metrics"].size(), 1u);
  // Unknown keys are configuration errors.
  const auto unknown = Write(dir_ / "bad.toml", "no_such_option = 3\n").string();
  EXPECT_EQ(RunCli({"--config", unknown, "metrics", "--preds", uniform_}).code, 2);
}

TEST_F(CliTest, EnvironmentBeatsConfigButNotFlags) {
  const auto toml = Write(dir_ / "run.toml", "metrics = \"conf_score\"\n").string();
  ::setenv("PREDMAT_METRICS", "im,cot", 1);
  auto r = RunCli({"--config", toml, "metrics", "--preds", uniform_});
  const auto env_count = r.code == 0 ? json::parse(r.out)["metrics"].size() : 0u;
  r = RunCli({"metrics", "--preds", uniform_, "--metrics", "conf_score"});
  const auto flag_count = r.code == 0 ? json::parse(r.out)["metrics"].size() : 0u;
  ::unsetenv("PREDMAT_METRICS");
  EXPECT_EQ(env_count, 2u);
  EXPECT_EQ(flag_count, 1u);
}

TEST_F(CliTest, OutFileReceivesReport) {
  const auto out = (dir_ / "report.json").string();
  const auto r = RunCli({"metrics", "--preds", uniform_, "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(json::parse(ReadFile(out))["command"], "metrics");
}

TEST_F(CliTest, SynthEvaluateAndRank) {
  const auto data = (dir_ / "data").string();
  auto r = RunCli({"synth", "--out", data, "--k", "4", "--dim", "6", "--seed", "3", "--n-train",
                   "200", "--n-val", "200", "--n-test", "200", "--epochs", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = json::parse(r.out);
  EXPECT_EQ(summary["entries"].size(), 25u);
  const auto manifest = (dir_ / "data" / "manifest.json").string();
  const auto scatter = (dir_ / "scatter.csv").string();
  r = RunCli({"evaluate", "--manifest", manifest, "--scatter-csv", scatter});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = json::parse(r.out);
  EXPECT_EQ(report["command"], "evaluate");
  EXPECT_EQ(report["study"]["results"].size(), 12u);
  EXPECT_TRUE(std::filesystem::exists(scatter));
  // The dataset-centric suite cannot be ranked.
  EXPECT_EQ(RunCli({"rank", "--manifest", manifest}).code, 2);

  const auto pool = (dir_ / "pool").string();
  r = RunCli({"synth", "--out", pool, "--mode", "model", "--models", "5", "--k", "4", "--dim", "6",
              "--n-train", "150", "--n-val", "150", "--n-test", "150"});
  ASSERT_EQ(r.code, 0) << r.err;
  r = RunCli({"rank", "--manifest", (dir_ / "pool" / "manifest.json").string(), "--metrics",
              "conf_score,nuclear_norm", "--transform", "conf_score=raw"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ranked = json::parse(r.out);
  ASSERT_EQ(ranked["study"]["rankings"].size(), 2u);
  EXPECT_EQ(ranked["study"]["rankings"][0]["ranking"].size(), 5u);
  EXPECT_EQ(RunCli({"evaluate", "--manifest", (dir_ / "pool" / "manifest.json").string()}).code, 2);
  EXPECT_EQ(RunCli({"rank", "--manifest", (dir_ / "pool" / "manifest.json").string(), "--transform",
                    "entropy=probit"})
                .code,
            2);
}

TEST_F(CliTest, SynthRejectsBadArguments) {
  const auto out = (dir_ / "x").string();
  EXPECT_EQ(RunCli({"synth", "--out", out, "--severities", "0..2"}).code, 2);
  EXPECT_EQ(RunCli({"synth", "--out", out, "--shift-kinds", "blur"}).code, 2);
  EXPECT_EQ(RunCli({"synth", "--out", out, "--mode", "sideways"}).code, 2);
  EXPECT_EQ(RunCli({"synth", "--out", out, "--imbalance", "1.5"}).code, 2);
}

TEST_F(CliTest, NarrowTruthRangeWarns) {
  // Three identical test sets: accuracy never moves.
  Manifest manifest;
  std::ofstream(dir_ / "p.csv") << "0.9,0.1\n0.2,0.8\n0.6,0.4\n";
  std::ofstream(dir_ / "y.csv") << "0\n1\n1\n";
  json doc = {{"mode", "dataset_centric"}, {"entries", json::array()}};
  for (const char* id : {"a", "b", "c"})
    doc["entries"].push_back(
        {{"model_id", "m"}, {"dataset_id", id}, {"predictions_path", "p.csv"}, {"labels_path", "y.csv"}});
  Write(dir_ / "manifest.json", doc.dump());
  const auto r = RunCli({"evaluate", "--manifest", (dir_ / "manifest.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_EQ(json::parse(r.out)["study"]["narrow_truth_range"], true);
}

}  // namespace
}  // namespace predmat::cli
