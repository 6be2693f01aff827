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

#ifndef PREDMAT_CORE_H_
#define PREDMAT_CORE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "predmat/matrix.h"

namespace predmat {

// Unnormalized classifier scores, n samples by k classes. Entries finite,
// n >= 1, k >= 2.
class LogitMatrix {
 public:
  explicit LogitMatrix(Matrix data);

  std::size_t n() const { return data_.rows(); }
  std::size_t k() const { return data_.cols(); }
  const Matrix& data() const { return data_; }
  std::span<const double> row(std::size_t i) const { return data_.row(i); }
  double operator()(std::size_t i, std::size_t j) const { return data_(i, j); }

 private:
  Matrix data_;
};

// Row-stochastic matrix of softmax outputs. Construction accepts rows whose
// sum is within kRowSumTolerance of one and rescales any row that is off by
// more than kExactRowSumSlack, so every stored row sums to one up to
// round-off. Rows outside the tolerance are rejected.
class PredictionMatrix {
 public:
  static constexpr double kRowSumTolerance = 1e-6;
  static constexpr double kExactRowSumSlack = 1e-12;

  explicit PredictionMatrix(Matrix data);

  std::size_t n() const { return data_.rows(); }
  std::size_t k() const { return data_.cols(); }
  const Matrix& data() const { return data_; }
  std::span<const double> row(std::size_t i) const { return data_.row(i); }
  double operator()(std::size_t i, std::size_t j) const { return data_(i, j); }

  bool operator==(const PredictionMatrix& other) const = default;

 private:
  Matrix data_;
};

// Ground-truth or predicted class indices.
class LabelVector {
 public:
  LabelVector() = default;
  explicit LabelVector(std::vector<int> labels);

  std::size_t size() const { return labels_.size(); }
  int operator[](std::size_t i) const { return labels_[i]; }
  const std::vector<int>& values() const { return labels_; }
  auto begin() const { return labels_.begin(); }
  auto end() const { return labels_.end(); }

  // Throws DataError unless size() == n and every label lies in [0, k).
  void CheckCompatible(std::size_t n, std::size_t k) const;

  bool operator==(const LabelVector& other) const = default;

 private:
  std::vector<int> labels_;
};

// Source-validation statistics consumed by ATC and DoC.
struct ValidationStats {
  double val_accuracy = 0.0;
  double val_conf_score = 0.0;
  double atc_threshold = 0.0;
};

enum class StudyMode { kDatasetCentric, kModelCentric };

std::string ToString(StudyMode mode);
StudyMode ParseStudyMode(const std::string& text);

struct ManifestEntry {
  std::string model_id;
  std::string dataset_id;
  std::string predictions_path;
  std::optional<std::string> logits_path;
  std::optional<std::string> labels_path;
};

// Labeled source-validation split for one model.
struct ValidationSource {
  std::string predictions_path;
  std::string labels_path;
};

struct Manifest {
  StudyMode mode = StudyMode::kDatasetCentric;
  std::vector<ManifestEntry> entries;
  // Keyed by model id, sorted.
  std::vector<std::pair<std::string, ValidationSource>> validation;

  const ValidationSource* FindValidation(const std::string& model_id) const;
  // Throws DataError when the mode's single-model / single-dataset rule is
  // violated or ids are duplicated.
  void Validate() const;
};

// Row-wise softmax with the row maximum subtracted before exponentiation.
PredictionMatrix Softmax(const LogitMatrix& logits);
void SoftmaxInPlace(std::span<double> row);

// Row-wise argmax; ties go to the lowest class index.
LabelVector Top1(const PredictionMatrix& preds);
int ArgMax(std::span<const double> row);

// Per-class count of top-1 predictions.
std::vector<std::size_t> PredictedClassCounts(const PredictionMatrix& preds);

double Accuracy(const PredictionMatrix& preds, const LabelVector& labels);
double MacroF1(const PredictionMatrix& preds, const LabelVector& labels);

// Logits recovered from probabilities as ln(p + 1e-12). Shift-equivalent to
// the true logits only up to a per-row constant.
LogitMatrix ReconstructLogits(const PredictionMatrix& preds);
inline constexpr double kLogitReconstructionFloor = 1e-12;

}  // namespace predmat

#endif  // PREDMAT_CORE_H_
