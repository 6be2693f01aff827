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

#ifndef PREDMAT_TESTS_TEST_UTIL_H_
#define PREDMAT_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "oracle.h"
#include "predmat/core.h"
#include "predmat/matrix.h"

namespace testutil {

inline predmat::PredictionMatrix Preds(const oracle::Rows& rows) {
  return predmat::PredictionMatrix(predmat::Matrix::FromRows(rows));
}

inline predmat::LogitMatrix Logits(const oracle::Rows& rows) {
  return predmat::LogitMatrix(predmat::Matrix::FromRows(rows));
}

inline oracle::Rows ToRows(const predmat::Matrix& m) {
  oracle::Rows rows(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) rows[i].assign(m.row(i).begin(), m.row(i).end());
  return rows;
}

inline oracle::Rows Uniform(std::size_t n, std::size_t k) {
  return oracle::Rows(n, std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

// Row i is one-hot on class i mod k.
inline oracle::Rows BalancedOneHot(std::size_t n, std::size_t k) {
  oracle::Rows rows(n, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < n; ++i) rows[i][i % k] = 1.0;
  return rows;
}

inline oracle::Rows SingleClassOneHot(std::size_t n, std::size_t k, std::size_t c = 0) {
  oracle::Rows rows(n, std::vector<double>(k, 0.0));
  for (auto& row : rows) row[c] = 1.0;
  return rows;
}

inline std::vector<std::size_t> RandomPermutation(std::mt19937_64& gen, std::size_t n) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), gen);
  return perm;
}

inline oracle::Rows PermuteRows(const oracle::Rows& rows, const std::vector<std::size_t>& perm) {
  oracle::Rows out;
  for (std::size_t i : perm) out.push_back(rows[i]);
  return out;
}

// Fresh empty directory under the build tree's temp area.
inline std::filesystem::path ScratchDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("predmat_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil

#endif  // PREDMAT_TESTS_TEST_UTIL_H_
