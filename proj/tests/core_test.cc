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
#include <random>

#include "predmat/core.h"
#include "predmat/error.h"
#include "test_util.h"

namespace predmat {
namespace {

using testutil::Logits;
using testutil::Preds;

TEST(Softmax, SymmetricRowIsUniform) {
  const auto p = Softmax(Logits({{0.0, 0.0}}));
  EXPECT_DOUBLE_EQ(p(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(p(0, 1), 0.5);
}

TEST(Softmax, ConstantRowIsUniformForAnyConstant) {
  for (double c : {-700.0, -3.0, 0.0, 12.5, 800.0}) {
    const auto p = Softmax(Logits({{c, c, c}}));
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(p(0, j), 1.0 / 3.0, 1e-15);
  }
}

TEST(Softmax, LogThreeAgainstZero) {
  const auto p = Softmax(Logits({{std::log(3.0), 0.0}}));
  EXPECT_NEAR(p(0, 0), 0.75, 1e-15);
  EXPECT_NEAR(p(0, 1), 0.25, 1e-15);
}

TEST(Softmax, RejectsNonFiniteWithRowIndex) {
  try {
    Softmax(Logits({{0.0, 1.0}, {NAN, 0.0}}));
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(Logits({{INFINITY, 0.0}}), DataError);
}

TEST(Softmax, ShiftInvariantOnRandomLogits) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> shift(-40.0, 40.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto z = oracle::RandomMatrix(gen, 7, 5, -10.0, 10.0);
    auto shifted = z;
    const double c = shift(gen);
    for (auto& row : shifted)
      for (double& v : row) v += c;
    const auto a = Softmax(Logits(z)), b = Softmax(Logits(shifted));
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(a(i, j), b(i, j), 1e-12);
  }
}

TEST(Softmax, RowsSumToOneForWideLogits) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = Softmax(Logits(oracle::RandomMatrix(gen, 9, 6, -50.0, 50.0)));
    for (std::size_t i = 0; i < p.n(); ++i) {
      double sum = 0.0;
      for (double v : p.row(i)) sum += v;
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(Top1, Examples) {
  EXPECT_EQ(Top1(Preds({{0.2, 0.8}, {0.9, 0.1}})).values(), (std::vector<int>{1, 0}));
  EXPECT_EQ(Top1(Preds({{0.5, 0.5}})).values(), (std::vector<int>{0}));
  EXPECT_EQ(Top1(Preds({{0.1, 0.3, 0.6}})).values(), (std::vector<int>{2}));
}

// Rows whose argmax is the requested class.
oracle::Rows RowsWithTop1(const std::vector<int>& top, std::size_t k) {
  oracle::Rows rows;
  for (int c : top) {
    std::vector<double> row(k, 0.4 / static_cast<double>(k - 1));
    row[static_cast<std::size_t>(c)] = 0.6;
    rows.push_back(row);
  }
  return rows;
}

TEST(Accuracy, Examples) {
  EXPECT_DOUBLE_EQ(Accuracy(Preds(RowsWithTop1({1, 0}, 2)), LabelVector({1, 0})), 1.0);
  EXPECT_DOUBLE_EQ(Accuracy(Preds(RowsWithTop1({1, 0}, 2)), LabelVector({0, 1})), 0.0);
  EXPECT_DOUBLE_EQ(Accuracy(Preds(RowsWithTop1({1, 0, 2, 2}, 3)), LabelVector({1, 1, 2, 0})), 0.5);
}

TEST(Accuracy, LengthMismatchIsDataError) {
  EXPECT_THROW(Accuracy(Preds(RowsWithTop1({1, 0}, 2)), LabelVector({1})), DataError);
  EXPECT_THROW(MacroF1(Preds(RowsWithTop1({1, 0}, 2)), LabelVector({1, 0, 1})), DataError);
}

TEST(Accuracy, RangeAndExactMatch) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = Preds(oracle::RandomStochastic(gen, 20, 4));
    const auto top = Top1(p);
    EXPECT_DOUBLE_EQ(Accuracy(p, top), 1.0);
    std::vector<int> labels = top.values();
    labels[trial % 20] = (labels[trial % 20] + 1) % 4;
    const double acc = Accuracy(p, LabelVector(labels));
    EXPECT_GE(acc, 0.0);
    EXPECT_LT(acc, 1.0);
  }
}

TEST(MacroF1, Examples) {
  EXPECT_DOUBLE_EQ(MacroF1(Preds(RowsWithTop1({0, 1}, 2)), LabelVector({0, 1})), 1.0);
  EXPECT_DOUBLE_EQ(MacroF1(Preds(RowsWithTop1({0, 0, 1, 1}, 2)), LabelVector({0, 0, 1, 1})), 1.0);
  // Class 0: precision 2/3, recall 1 → 0.8. Class 1: precision 1, recall 1/2 → 2/3.
  EXPECT_NEAR(MacroF1(Preds(RowsWithTop1({0, 0, 0, 1}, 2)), LabelVector({0, 0, 1, 1})),
              (0.8 + 2.0 / 3.0) / 2.0, 1e-12);
}

TEST(MacroF1, SkipsAbsentClassesAndZeroesMissedOnes) {
  // Class 2 never appears: skipped. Class 1 is never predicted: F1 = 0.
  EXPECT_NEAR(MacroF1(Preds(RowsWithTop1({0, 0, 0}, 3)), LabelVector({0, 0, 1})),
              (0.8 + 0.0) / 2.0, 1e-12);
}

TEST(Accuracy, JointRowPermutationInvariance) {
  std::mt19937_64 gen(14);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rows = oracle::RandomStochastic(gen, 15, 3);
    std::vector<int> labels(15);
    for (int& l : labels) l = static_cast<int>(gen() % 3);
    const auto perm = testutil::RandomPermutation(gen, 15);
    std::vector<int> permuted_labels;
    for (std::size_t i : perm) permuted_labels.push_back(labels[i]);
    const auto a = Preds(rows), b = Preds(testutil::PermuteRows(rows, perm));
    EXPECT_DOUBLE_EQ(Accuracy(a, LabelVector(labels)), Accuracy(b, LabelVector(permuted_labels)));
    EXPECT_NEAR(MacroF1(a, LabelVector(labels)), MacroF1(b, LabelVector(permuted_labels)), 1e-15);
  }
}

TEST(PredictionMatrix, RejectsBadRows) {
  EXPECT_THROW(Preds({{0.6, 0.6}}), DataError);
  EXPECT_THROW(Preds({{1.1, -0.1}}), DataError);
  EXPECT_THROW(Preds({{1.0}}), DataError);
}

TEST(PredictionMatrix, RenormalizesWithinTolerance) {
  const auto p = Preds({{0.5 + 4e-7, 0.5}});
  EXPECT_NEAR(p(0, 0) + p(0, 1), 1.0, 1e-15);
}

TEST(LabelVector, CompatibilityChecks) {
  EXPECT_NO_THROW(LabelVector({0, 1}).CheckCompatible(2, 2));
  EXPECT_THROW(LabelVector({0, 2}).CheckCompatible(2, 2), DataError);
  EXPECT_THROW(LabelVector({0, -1}).CheckCompatible(2, 2), DataError);
  EXPECT_THROW(LabelVector({0}).CheckCompatible(2, 2), DataError);
}

TEST(Manifest, ModeRules) {
  Manifest m;
  m.mode = StudyMode::kDatasetCentric;
  m.entries = {{"a", "d1", "p1", {}, {}}, {"b", "d2", "p2", {}, {}}};
  EXPECT_THROW(m.Validate(), DataError);
  m.mode = StudyMode::kModelCentric;
  EXPECT_THROW(m.Validate(), DataError);
  m.entries[1].dataset_id = "d1";
  EXPECT_NO_THROW(m.Validate());
}

TEST(ReconstructLogits, RecoversPredictions) {
  const auto p = Preds({{0.7, 0.2, 0.1}, {0.0, 0.5, 0.5}});
  const auto back = Softmax(ReconstructLogits(p));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(back(i, j), p(i, j), 1e-11);
}

}  // namespace
}  // namespace predmat
