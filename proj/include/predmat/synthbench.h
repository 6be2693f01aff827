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

#ifndef PREDMAT_SYNTHBENCH_H_
#define PREDMAT_SYNTHBENCH_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "predmat/core.h"
#include "predmat/matrix.h"
#include "predmat/study.h"

namespace predmat::synth {

struct TaskSpec {
  std::size_t k = 10;
  std::size_t dim = 16;
  double class_separation = 4.0;
  std::uint64_t seed = 1;
  std::size_t n_train = 2000;
  std::size_t n_validation = 2000;
  std::size_t n_test = 2000;

  void Validate() const;
};

struct Dataset {
  Matrix features;  // n × dim
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  LabelVector Labels() const { return LabelVector(labels); }
};

// Gaussian class-conditional task with identity covariance. Class c has
// mean (sep/√2)·a_c·e_c when dim ≥ k (random unit directions otherwise),
// with radius profile a_c = 1 − 0.7·c/(k−1), so high-index classes sit
// closer together and are the hard ones.
// Class labels cycle 0..k−1 so every split is balanced.
struct Task {
  TaskSpec spec;
  Matrix class_means;  // k × dim
  Dataset train;
  Dataset validation;
  Dataset test;
};

Task GenerateTask(const TaskSpec& spec);

// Multinomial logistic regression over an optional feature subset.
struct LinearModel {
  Matrix weights;  // features × k
  std::vector<double> bias;
  // Columns of the input the model reads; empty means all.
  std::vector<std::size_t> features;

  LogitMatrix Logits(const Matrix& x) const;
};

// Mean cross-entropy of the model on (x, labels).
double CrossEntropyLoss(const LinearModel& model, const Matrix& x, std::span<const int> labels);
// Analytic gradient of CrossEntropyLoss, returned with the model's shapes.
LinearModel CrossEntropyGradient(const LinearModel& model, const Matrix& x,
                                 std::span<const int> labels);

// 1 / L with L = λ_max(X̃ᵀX̃ / n) / 2, X̃ the selected features plus a bias
// column. L bounds the Hessian of the mean cross-entropy, so gradient
// descent at or below this rate never increases the loss.
double StableLearningRate(const Matrix& x, std::span<const std::size_t> features);

struct TrainOptions {
  std::size_t epochs = 200;
  // Absolute rate when positive; otherwise rate_fraction times
  // StableLearningRate.
  double learning_rate = 0.0;
  double rate_fraction = 1.0;
  std::uint64_t seed = 1;
  // Init weights ~ N(0, init_scale²); biases start at zero.
  double init_scale = 0.01;
  std::vector<std::size_t> features;
};

struct TrainResult {
  LinearModel model;
  double learning_rate = 0.0;
  // Loss before the first step and after every epoch.
  std::vector<double> loss_history;
};

// Full-batch gradient descent. NumericalError naming the epoch if the loss
// becomes non-finite.
TrainResult TrainLinearSoftmax(const Dataset& train, std::size_t k, const TrainOptions& options);

enum class ShiftKind { kGaussianNoise, kFeatureDropout, kMeanShift, kCovarianceScale, kLabelPriorShift };

std::string ToString(ShiftKind kind);
ShiftKind ParseShiftKind(const std::string& text);
const std::vector<ShiftKind>& AllShiftKinds();

struct ShiftSpec {
  ShiftKind kind = ShiftKind::kGaussianNoise;
  int severity = 1;  // 1..5

  void Validate() const;
  std::string Id() const;  // e.g. "gaussian_noise_s3"
};

// Severity grids, indexed by severity − 1:
//   gaussian_noise     additive N(0, σ²) noise, σ ∈ {0.4, 0.8, 1.2, 1.6, 2.0}
//   feature_dropout    each entry zeroed with rate ∈ {0.1, 0.2, 0.3, 0.4, 0.5}
//   mean_shift         translation along a seeded unit direction by
//                      {0.2, 0.4, 0.6, 0.8, 1.0} · class_separation
//   covariance_scale   spread about empirical class means scaled by
//                      {1.25, 1.5, 2.0, 2.5, 3.0}
//   label_prior_shift  class c keeps a fraction r^((k−1−c)/(k−1)) of its
//                      samples, r ∈ {0.8, 0.6, 0.4, 0.25, 0.1}; features untouched
// gaussian_noise and covariance_scale finish with one global rescale
// restoring the input's mean squared feature norm, as input normalization
// would, so they cannot raise confidence by inflating feature magnitudes.
// Dropout shrinks norms and mean_shift moves data away from the training
// distribution; neither is rescaled.
double SeverityParameter(ShiftKind kind, int severity);

Dataset ApplyShift(const Dataset& test, std::size_t k, double class_separation,
                   const ShiftSpec& shift, std::uint64_t seed);

struct ImbalanceSpec {
  double ratio_m = 1.0;  // (0, 1]
  // Size of class 0, the most frequent; 0 picks the largest feasible value.
  std::size_t head_count = 0;

  void Validate() const;
};

// Counts n_j ∝ m^(j/(k−1)) over a total of round(head·Σ_j m^(j/(k−1))),
// apportioned by largest remainder.
std::vector<std::size_t> ImbalanceCounts(std::size_t k, const ImbalanceSpec& spec);

// Seeded per-class subsample realizing ImbalanceCounts; selected samples
// keep their original order. DataError when a class lacks supply.
Dataset ApplyImbalance(const Dataset& test, std::size_t k, const ImbalanceSpec& spec,
                       std::uint64_t seed);

struct ModelSpec {
  std::string id;
  TrainOptions train;
};

// Pool of `count` models derived from `seed`. Model i reads a random subset
// of round((1 − 0.65·i/(count−1))·dim) features, trains 400 or 600 epochs at
// 1 or 0.75 times the stable rate, and has its own initialization seed.
std::vector<ModelSpec> ModelPool(std::size_t count, std::size_t dim, std::uint64_t seed);

struct SuiteSpec {
  TaskSpec task;
  StudyMode mode = StudyMode::kDatasetCentric;
  std::size_t models = 1;
  // Dataset-centric suites build one test set per shift; model-centric
  // suites take exactly one.
  std::vector<ShiftSpec> shifts;
  std::optional<ImbalanceSpec> imbalance;
  // Used for the single model of a dataset-centric suite.
  std::size_t epochs = 200;
  int threads = 1;

  void Validate() const;
};

struct SuiteEntry {
  std::string model_id;
  std::string dataset_id;
  LogitMatrix logits;
  PredictionMatrix preds;
  LabelVector labels;
};

struct SuiteValidation {
  std::string model_id;
  PredictionMatrix preds;
  LabelVector labels;
};

struct Suite {
  StudyMode mode = StudyMode::kDatasetCentric;
  std::vector<SuiteEntry> entries;
  std::vector<SuiteValidation> validation;
};

Suite BuildSuite(const SuiteSpec& spec);

// In-memory study input equivalent to loading the emitted manifest.
study::LoadedStudy ToLoadedStudy(const Suite& suite);

// Writes predictions, logits and labels per entry, validation files per
// model and manifest.json into out_dir; returns the manifest as written
// (paths relative to out_dir).
Manifest EmitSuite(const Suite& suite, const std::filesystem::path& out_dir);

}  // namespace predmat::synth

#endif  // PREDMAT_SYNTHBENCH_H_
