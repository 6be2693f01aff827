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

#include <fstream>
#include <random>
#include <sstream>

#include "predmat/error.h"
#include "predmat/io.h"
#include "test_util.h"

namespace predmat::io {
namespace {

std::filesystem::path WriteFile(const std::filesystem::path& dir, const std::string& name,
                                const std::string& text) {
  const auto path = dir / name;
  std::ofstream(path) << text;
  return path;
}

std::string ErrorText(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

TEST(PredictionCsv, ParsesSimpleMatrix) {
  const auto dir = testutil::ScratchDir("io_simple");
  const auto p = LoadPredictionCsv(WriteFile(dir, "p.csv", "0.5,0.5\n0.9,0.1\n"));
  ASSERT_EQ(p.n(), 2u);
  ASSERT_EQ(p.k(), 2u);
  EXPECT_DOUBLE_EQ(p(1, 0), 0.9);
}

TEST(PredictionCsv, RowSumErrorNamesLine) {
  const auto dir = testutil::ScratchDir("io_rowsum");
  const auto path = WriteFile(dir, "p.csv", "0.6,0.6\n0.5,0.5\n");
  const auto msg = ErrorText([&] { LoadPredictionCsv(path); });
  EXPECT_NE(msg.find(":1:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("sums"), std::string::npos) << msg;
}

TEST(PredictionCsv, SkipsHashHeaderAndReportsPhysicalLines) {
  const auto dir = testutil::ScratchDir("io_header");
  const auto p = LoadPredictionCsv(WriteFile(dir, "p.csv", "# c0,c1\n0.25,0.75\n"));
  EXPECT_EQ(p.n(), 1u);
  const auto bad = WriteFile(dir, "bad.csv", "# c0,c1\n0.25,0.75\n0.2,0.3,0.5\n");
  const auto msg = ErrorText([&] { LoadPredictionCsv(bad); });
  EXPECT_NE(msg.find(":3:"), std::string::npos) << msg;
}

TEST(PredictionCsv, RejectsMalformedFields) {
  const auto dir = testutil::ScratchDir("io_malformed");
  EXPECT_THROW(LoadPredictionCsv(WriteFile(dir, "a.csv", "0.5,abc\n")), DataError);
  EXPECT_THROW(LoadPredictionCsv(WriteFile(dir, "b.csv", "")), DataError);
  EXPECT_THROW(LoadPredictionCsv(dir / "missing.csv"), DataError);
}

TEST(PredictionCsv, RenormalizesNearStochasticRows) {
  const auto dir = testutil::ScratchDir("io_renorm");
  const auto p = LoadPredictionCsv(WriteFile(dir, "p.csv", "0.3333333,0.6666666\n"));
  EXPECT_NEAR(p(0, 0) + p(0, 1), 1.0, 1e-15);
}

TEST(LogitCsv, RejectsNonFinite) {
  const auto dir = testutil::ScratchDir("io_logit");
  EXPECT_EQ(LoadLogitCsv(WriteFile(dir, "z.csv", "1.5,-2\n")).k(), 2u);
  EXPECT_THROW(LoadLogitCsv(WriteFile(dir, "bad.csv", "inf,0\n")), DataError);
}

TEST(LabelsCsv, ParsesAndRejects) {
  const auto dir = testutil::ScratchDir("io_labels");
  EXPECT_EQ(LoadLabelsCsv(WriteFile(dir, "l.csv", "0\n2\n1\n")).values(),
            (std::vector<int>{0, 2, 1}));
  EXPECT_THROW(LoadLabelsCsv(WriteFile(dir, "bad.csv", "0\nx\n")), DataError);
}

TEST(CanonicalWriter, RoundTripsBitForBit) {
  std::mt19937_64 gen(21);
  const auto dir = testutil::ScratchDir("io_roundtrip");
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = Matrix::FromRows(oracle::RandomMatrix(gen, 6, 4, -1e3, 1e3));
    SaveMatrixCsv(dir / "m.csv", m);
    EXPECT_EQ(ReadMatrixCsv(dir / "m.csv"), m);
  }
  const auto p = PredictionMatrix(Matrix::FromRows(oracle::RandomStochastic(gen, 10, 3)));
  SaveMatrixCsv(dir / "p.csv", p.data());
  EXPECT_EQ(LoadPredictionCsv(dir / "p.csv"), p);
}

TEST(Manifest, ParsesAndResolvesRelativePaths) {
  const std::string text = R"({"mode": "model_centric", "entries": [
    {"model_id": "a", "dataset_id": "d", "predictions_path": "a.csv", "labels_path": "y.csv"},
    {"model_id": "b", "dataset_id": "d", "predictions_path": "/abs/b.csv"}]})";
  const auto m = ParseManifest(text, "m.json", "/base");
  EXPECT_EQ(m.mode, StudyMode::kModelCentric);
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_EQ(m.entries[0].predictions_path, "/base/a.csv");
  EXPECT_EQ(m.entries[0].labels_path.value(), "/base/y.csv");
  EXPECT_EQ(m.entries[1].predictions_path, "/abs/b.csv");
  EXPECT_FALSE(m.entries[1].logits_path.has_value());
}

TEST(Manifest, DatasetCentricWithTwoModelsIsModeViolation) {
  const std::string text = R"({"mode": "dataset_centric", "entries": [
    {"model_id": "a", "dataset_id": "d1", "predictions_path": "a.csv"},
    {"model_id": "b", "dataset_id": "d2", "predictions_path": "b.csv"}]})";
  const auto msg = ErrorText([&] { ParseManifest(text, "m.json", "/"); });
  EXPECT_NE(msg.find("mode violation"), std::string::npos) << msg;
}

TEST(Manifest, RejectsMalformedDocuments) {
  EXPECT_THROW(ParseManifest("{", "m.json", "/"), DataError);
  EXPECT_THROW(ParseManifest(R"({"mode": "dataset_centric"})", "m.json", "/"), DataError);
  EXPECT_THROW(ParseManifest(R"({"mode": "sideways", "entries": []})", "m.json", "/"), DataError);
  EXPECT_THROW(ParseManifest(R"({"mode": "dataset_centric", "entries": [{"model_id": "a"}]})",
                             "m.json", "/"),
               DataError);
}

TEST(Manifest, SaveLoadRoundTrip) {
  const auto dir = testutil::ScratchDir("io_manifest");
  Manifest m;
  m.mode = StudyMode::kDatasetCentric;
  m.entries = {{"a", "d1", "d1.csv", "d1.logits.csv", "d1.labels.csv"},
               {"a", "d2", "d2.csv", {}, "d2.labels.csv"}};
  SaveManifest(dir / "manifest.json", m);
  const auto back = LoadManifest(dir / "manifest.json");
  ASSERT_EQ(back.entries.size(), 2u);
  EXPECT_EQ(back.entries[0].predictions_path, (dir / "d1.csv").string());
  EXPECT_EQ(back.entries[0].logits_path.value(), (dir / "d1.logits.csv").string());
  EXPECT_FALSE(back.entries[1].logits_path.has_value());
}

TEST(WeightsCsv, NormalizesOnLoad) {
  const auto dir = testutil::ScratchDir("io_weights");
  const auto w = LoadWeightsCsv(WriteFile(dir, "w.csv", "1,3\n"));
  ASSERT_EQ(w.size(), 2u);
  EXPECT_DOUBLE_EQ(w[0], 0.25);
  EXPECT_THROW(LoadWeightsCsv(WriteFile(dir, "neg.csv", "1,-1\n")), DataError);
}

}  // namespace
}  // namespace predmat::io
