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

#include "predmat/core.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "predmat/error.h"

namespace predmat {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DataError("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::FromRows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols_) {
      throw DataError("row " + std::to_string(i) + " has " +
                      std::to_string(rows[i].size()) + " columns, expected " +
                      std::to_string(m.cols_));
    }
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

Matrix Matrix::Identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::Transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::Gram() const {
  Matrix g(cols_, cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    auto x = row(r);
    for (std::size_t i = 0; i < cols_; ++i) {
      if (x[i] == 0.0) continue;
      for (std::size_t j = i; j < cols_; ++j) g(i, j) += x[i] * x[j];
    }
  }
  for (std::size_t i = 0; i < cols_; ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

Matrix Matrix::OuterGram() const {
  Matrix g(rows_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = i; j < rows_; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < cols_; ++c) s += (*this)(i, c) * (*this)(j, c);
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  return g;
}

double Matrix::FrobeniusNorm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DataError("matrix product shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const double v = a(i, l);
      if (v == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += v * b(l, j);
    }
  return c;
}

namespace {

void CheckShape(const Matrix& m, const char* what) {
  if (m.rows() < 1) throw DataError(std::string(what) + ": need at least one row");
  if (m.cols() < 2) throw DataError(std::string(what) + ": need at least two classes");
}

}  // namespace

LogitMatrix::LogitMatrix(Matrix data) : data_(std::move(data)) {
  CheckShape(data_, "logit matrix");
  for (std::size_t i = 0; i < data_.rows(); ++i)
    for (double v : data_.row(i))
      if (!std::isfinite(v))
        throw DataError("logit matrix: non-finite entry in row " + std::to_string(i));
}

PredictionMatrix::PredictionMatrix(Matrix data) : data_(std::move(data)) {
  CheckShape(data_, "prediction matrix");
  for (std::size_t i = 0; i < data_.rows(); ++i) {
    auto r = data_.row(i);
    double sum = 0.0;
    for (double v : r) {
      if (!std::isfinite(v) || v < 0.0 || v > 1.0 + kRowSumTolerance)
        throw DataError("prediction matrix: entry outside [0,1] in row " +
                        std::to_string(i));
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance)
      throw DataError("prediction matrix: row " + std::to_string(i) + " sums to " +
                      std::to_string(sum));
    if (std::abs(sum - 1.0) > kExactRowSumSlack)
      for (double& v : r) v /= sum;
  }
}

LabelVector::LabelVector(std::vector<int> labels) : labels_(std::move(labels)) {}

void LabelVector::CheckCompatible(std::size_t n, std::size_t k) const {
  if (labels_.size() != n)
    throw DataError("label count " + std::to_string(labels_.size()) +
                    " does not match " + std::to_string(n) + " samples");
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] < 0 || static_cast<std::size_t>(labels_[i]) >= k)
      throw DataError("label " + std::to_string(labels_[i]) + " at position " +
                      std::to_string(i) + " outside [0, " + std::to_string(k) + ")");
}

std::string ToString(StudyMode mode) {
  return mode == StudyMode::kDatasetCentric ? "dataset_centric" : "model_centric";
}

StudyMode ParseStudyMode(const std::string& text) {
  if (text == "dataset_centric" || text == "dataset") return StudyMode::kDatasetCentric;
  if (text == "model_centric" || text == "model") return StudyMode::kModelCentric;
  throw DataError("unknown study mode '" + text + "'");
}

const ValidationSource* Manifest::FindValidation(const std::string& model_id) const {
  for (const auto& [id, source] : validation)
    if (id == model_id) return &source;
  return nullptr;
}

void Manifest::Validate() const {
  if (entries.empty()) throw DataError("manifest has no entries");
  std::set<std::string> models, datasets;
  std::set<std::pair<std::string, std::string>> cells;
  for (const auto& e : entries) {
    models.insert(e.model_id);
    datasets.insert(e.dataset_id);
    if (!cells.emplace(e.model_id, e.dataset_id).second)
      throw DataError("manifest: duplicate entry for model '" + e.model_id +
                      "' on dataset '" + e.dataset_id + "'");
  }
  if (mode == StudyMode::kDatasetCentric && models.size() != 1)
    throw DataError("manifest mode violation: dataset_centric requires exactly one "
                    "model_id, found " + std::to_string(models.size()));
  if (mode == StudyMode::kModelCentric && datasets.size() != 1)
    throw DataError("manifest mode violation: model_centric requires exactly one "
                    "dataset_id, found " + std::to_string(datasets.size()));
}

void SoftmaxInPlace(std::span<double> row) {
  const double max = *std::max_element(row.begin(), row.end());
  double sum = 0.0;
  for (double& v : row) {
    v = std::exp(v - max);
    sum += v;
  }
  for (double& v : row) v /= sum;
}

PredictionMatrix Softmax(const LogitMatrix& logits) {
  Matrix out = logits.data();
  for (std::size_t i = 0; i < out.rows(); ++i) SoftmaxInPlace(out.row(i));
  return PredictionMatrix(std::move(out));
}

int ArgMax(std::span<const double> row) {
  int best = 0;
  for (std::size_t j = 1; j < row.size(); ++j)
    if (row[j] > row[best]) best = static_cast<int>(j);
  return best;
}

LabelVector Top1(const PredictionMatrix& preds) {
  std::vector<int> out(preds.n());
  for (std::size_t i = 0; i < preds.n(); ++i) out[i] = ArgMax(preds.row(i));
  return LabelVector(std::move(out));
}

std::vector<std::size_t> PredictedClassCounts(const PredictionMatrix& preds) {
  std::vector<std::size_t> counts(preds.k(), 0);
  for (std::size_t i = 0; i < preds.n(); ++i) ++counts[ArgMax(preds.row(i))];
  return counts;
}

double Accuracy(const PredictionMatrix& preds, const LabelVector& labels) {
  labels.CheckCompatible(preds.n(), preds.k());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < preds.n(); ++i)
    if (ArgMax(preds.row(i)) == labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(preds.n());
}

double MacroF1(const PredictionMatrix& preds, const LabelVector& labels) {
  labels.CheckCompatible(preds.n(), preds.k());
  const std::size_t k = preds.k();
  std::vector<std::size_t> tp(k, 0), predicted(k, 0), actual(k, 0);
  for (std::size_t i = 0; i < preds.n(); ++i) {
    const int p = ArgMax(preds.row(i));
    ++predicted[p];
    ++actual[labels[i]];
    if (p == labels[i]) ++tp[p];
  }
  double sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < k; ++c) {
    if (predicted[c] == 0 && actual[c] == 0) continue;
    ++present;
    // F1 = 2 TP / (predicted + actual); zero when TP is zero.
    sum += 2.0 * static_cast<double>(tp[c]) /
           static_cast<double>(predicted[c] + actual[c]);
  }
  return sum / static_cast<double>(present);
}

LogitMatrix ReconstructLogits(const PredictionMatrix& preds) {
  Matrix z = preds.data();
  for (double& v : z.values()) v = std::log(v + kLogitReconstructionFloor);
  return LogitMatrix(std::move(z));
}

}  // namespace predmat
