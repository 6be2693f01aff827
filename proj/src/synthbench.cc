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

#include "predmat/synthbench.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "predmat/eigen.h"
#include "predmat/error.h"
#include "predmat/io.h"
#include "predmat/rng.h"
#include "predmat/transport.h"

namespace predmat::synth {

namespace {

// Stream indices under the task or suite seed.
constexpr std::uint64_t kMeansStream = 0;
constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kValidationStream = 2;
constexpr std::uint64_t kTestStream = 3;
constexpr std::uint64_t kModelStream = 100;
constexpr std::uint64_t kShiftStream = 1000;
constexpr std::uint64_t kImbalanceStream = 2000;

// Class c sits at radius 1 − kRadiusDrop·c/(k−1) of the full separation.
constexpr double kRadiusDrop = 0.7;

Dataset SampleSplit(const Matrix& means, std::size_t n, std::uint64_t seed) {
  const std::size_t k = means.rows(), dim = means.cols();
  rng::SplitMix64 gen(seed);
  Dataset d{Matrix(n, dim), std::vector<int>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % k);
    d.labels[i] = c;
    for (std::size_t f = 0; f < dim; ++f) d.features(i, f) = means(c, f) + gen.Normal();
  }
  return d;
}

Dataset Subset(const Dataset& d, const std::vector<std::size_t>& keep) {
  Dataset out{Matrix(keep.size(), d.features.cols()), std::vector<int>(keep.size())};
  for (std::size_t r = 0; r < keep.size(); ++r) {
    out.labels[r] = d.labels[keep[r]];
    std::copy_n(d.features.row(keep[r]).begin(), d.features.cols(), out.features.row(r).begin());
  }
  return out;
}

std::vector<std::vector<std::size_t>> IndicesByClass(const Dataset& d, std::size_t k) {
  std::vector<std::vector<std::size_t>> by_class(k);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.labels[i] < 0 || static_cast<std::size_t>(d.labels[i]) >= k)
      throw DataError("label " + std::to_string(d.labels[i]) + " outside [0, " +
                      std::to_string(k) + ")");
    by_class[d.labels[i]].push_back(i);
  }
  return by_class;
}

// Seeded choice of `count` indices from `pool` without replacement
// (partial Fisher-Yates), returned in ascending order.
std::vector<std::size_t> Choose(std::vector<std::size_t> pool, std::size_t count,
                                rng::SplitMix64& gen) {
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + gen.Below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<std::size_t> AllFeatures(std::size_t dim) {
  std::vector<std::size_t> f(dim);
  std::iota(f.begin(), f.end(), 0);
  return f;
}

// Selected columns of x with a trailing bias column of ones.
Matrix DesignMatrix(const Matrix& x, std::span<const std::size_t> features) {
  Matrix out(x.rows(), features.size() + 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t f = 0; f < features.size(); ++f) out(i, f) = x(i, features[f]);
    out(i, features.size()) = 1.0;
  }
  return out;
}

std::vector<std::size_t> ResolvedFeatures(const LinearModel& model, std::size_t dim) {
  return model.features.empty() ? AllFeatures(dim) : model.features;
}

void CheckShapes(const LinearModel& model, const Matrix& x, std::span<const int> labels) {
  if (x.rows() != labels.size()) throw DataError("feature rows and labels differ in length");
  if (x.rows() == 0) throw DataError("empty dataset");
  const std::size_t used = model.features.empty() ? x.cols() : model.features.size();
  if (model.weights.rows() != used || model.bias.size() != model.weights.cols())
    throw DataError("model shape does not match the features");
  for (std::size_t f : model.features)
    if (f >= x.cols()) throw DataError("model reads feature " + std::to_string(f) + " of " +
                                       std::to_string(x.cols()));
}

double LogSumExp(std::span<const double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s);
}

double MeanSquaredNorm(const Matrix& x) {
  double s = 0.0;
  for (double v : x.values()) s += v * v;
  return s / static_cast<double>(x.rows());
}

// Scales `shifted` so its mean squared row norm equals that of `reference`.
void RestoreMeanSquaredNorm(const Matrix& reference, Matrix& shifted) {
  const double target = MeanSquaredNorm(reference), current = MeanSquaredNorm(shifted);
  if (current <= 0.0 || target <= 0.0) return;
  const double scale = std::sqrt(target / current);
  for (double& v : shifted.values()) v *= scale;
}

}  // namespace

void TaskSpec::Validate() const {
  if (k < 2) throw ConfigError("task needs k >= 2, got " + std::to_string(k));
  if (dim < 2) throw ConfigError("task needs dim >= 2, got " + std::to_string(dim));
  if (!(class_separation >= 0.0) || !std::isfinite(class_separation))
    throw ConfigError("class separation must be a finite non-negative number");
  if (n_train == 0 || n_validation == 0 || n_test == 0)
    throw ConfigError("task split sizes must be positive");
}

Task GenerateTask(const TaskSpec& spec) {
  spec.Validate();
  Task task;
  task.spec = spec;
  const std::size_t k = spec.k, dim = spec.dim;
  task.class_means = Matrix(k, dim);
  rng::SplitMix64 gen(rng::DeriveSeed(spec.seed, kMeansStream));
  const double scale = spec.class_separation / std::sqrt(2.0);
  for (std::size_t c = 0; c < k; ++c) {
    const double radius = 1.0 - kRadiusDrop * static_cast<double>(c) / static_cast<double>(k - 1);
    if (dim >= k) {
      task.class_means(c, c) = scale * radius;
      continue;
    }
    std::vector<double> dir(dim);
    double norm = 0.0;
    while (norm == 0.0) {
      for (double& v : dir) v = gen.Normal();
      norm = std::sqrt(std::inner_product(dir.begin(), dir.end(), dir.begin(), 0.0));
    }
    for (std::size_t f = 0; f < dim; ++f) task.class_means(c, f) = scale * radius * dir[f] / norm;
  }
  task.train = SampleSplit(task.class_means, spec.n_train, rng::DeriveSeed(spec.seed, kTrainStream));
  task.validation =
      SampleSplit(task.class_means, spec.n_validation, rng::DeriveSeed(spec.seed, kValidationStream));
  task.test = SampleSplit(task.class_means, spec.n_test, rng::DeriveSeed(spec.seed, kTestStream));
  return task;
}

LogitMatrix LinearModel::Logits(const Matrix& x) const {
  const auto feats = features.empty() ? AllFeatures(x.cols()) : features;
  if (weights.rows() != feats.size())
    throw DataError("model expects " + std::to_string(weights.rows()) + " features");
  const std::size_t k = weights.cols();
  Matrix z(x.rows(), k);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t c = 0; c < k; ++c) {
      double s = bias[c];
      for (std::size_t f = 0; f < feats.size(); ++f) s += x(i, feats[f]) * weights(f, c);
      z(i, c) = s;
    }
  return LogitMatrix(std::move(z));
}

double CrossEntropyLoss(const LinearModel& model, const Matrix& x, std::span<const int> labels) {
  CheckShapes(model, x, labels);
  const LogitMatrix z = model.Logits(x);
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) total += LogSumExp(z.row(i)) - z(i, labels[i]);
  return total / static_cast<double>(x.rows());
}

LinearModel CrossEntropyGradient(const LinearModel& model, const Matrix& x,
                                 std::span<const int> labels) {
  CheckShapes(model, x, labels);
  const auto feats = ResolvedFeatures(model, x.cols());
  const std::size_t n = x.rows(), k = model.weights.cols();
  const LogitMatrix z = model.Logits(x);
  LinearModel grad{Matrix(feats.size(), k), std::vector<double>(k, 0.0), model.features};
  std::vector<double> residual(k);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(z.row(i).begin(), z.row(i).end(), residual.begin());
    SoftmaxInPlace(residual);
    residual[labels[i]] -= 1.0;
    for (std::size_t c = 0; c < k; ++c) {
      grad.bias[c] += residual[c];
      for (std::size_t f = 0; f < feats.size(); ++f)
        grad.weights(f, c) += x(i, feats[f]) * residual[c];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (double& v : grad.weights.values()) v *= inv_n;
  for (double& v : grad.bias) v *= inv_n;
  return grad;
}

double StableLearningRate(const Matrix& x, std::span<const std::size_t> features) {
  const auto feats = features.empty() ? AllFeatures(x.cols())
                                      : std::vector<std::size_t>(features.begin(), features.end());
  Matrix gram = DesignMatrix(x, feats).Gram();
  for (double& v : gram.values()) v /= static_cast<double>(x.rows());
  const double lambda = numerics::SymEigenvalues(gram).front();
  return 2.0 / lambda;
}

TrainResult TrainLinearSoftmax(const Dataset& train, std::size_t k, const TrainOptions& options) {
  if (train.size() == 0) throw DataError("cannot train on an empty set");
  if (k < 2) throw ConfigError("training needs k >= 2");
  const std::size_t dim = train.features.cols();
  for (std::size_t f : options.features)
    if (f >= dim) throw ConfigError("feature index " + std::to_string(f) + " out of range");
  const auto feats = options.features.empty() ? AllFeatures(dim) : options.features;

  TrainResult result;
  LinearModel& model = result.model;
  model.weights = Matrix(feats.size(), k);
  model.bias.assign(k, 0.0);
  model.features = options.features;
  rng::SplitMix64 gen(options.seed);
  for (double& w : model.weights.values()) w = options.init_scale * gen.Normal();

  result.learning_rate = options.learning_rate > 0.0
                             ? options.learning_rate
                             : options.rate_fraction *
                                   StableLearningRate(train.features, options.features);
  const double lr = result.learning_rate;
  result.loss_history.push_back(CrossEntropyLoss(model, train.features, train.labels));
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    const LinearModel grad = CrossEntropyGradient(model, train.features, train.labels);
    auto w = model.weights.values();
    auto g = grad.weights.values();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * g[i];
    for (std::size_t c = 0; c < k; ++c) model.bias[c] -= lr * grad.bias[c];
    double loss;
    try {
      loss = CrossEntropyLoss(model, train.features, train.labels);
    } catch (const DataError&) {
      loss = std::numeric_limits<double>::quiet_NaN();
    }
    if (!std::isfinite(loss))
      throw NumericalError("training diverged at epoch " + std::to_string(epoch) +
                           " (learning rate " + io::FormatDouble(lr) + ")");
    result.loss_history.push_back(loss);
  }
  return result;
}

std::string ToString(ShiftKind kind) {
  switch (kind) {
    case ShiftKind::kGaussianNoise:
      return "gaussian_noise";
    case ShiftKind::kFeatureDropout:
      return "feature_dropout";
    case ShiftKind::kMeanShift:
      return "mean_shift";
    case ShiftKind::kCovarianceScale:
      return "covariance_scale";
    case ShiftKind::kLabelPriorShift:
      return "label_prior_shift";
  }
  return "unknown";
}

const std::vector<ShiftKind>& AllShiftKinds() {
  static const std::vector<ShiftKind> kKinds = {
      ShiftKind::kGaussianNoise, ShiftKind::kFeatureDropout, ShiftKind::kMeanShift,
      ShiftKind::kCovarianceScale, ShiftKind::kLabelPriorShift};
  return kKinds;
}

ShiftKind ParseShiftKind(const std::string& text) {
  for (ShiftKind k : AllShiftKinds())
    if (ToString(k) == text) return k;
  throw ConfigError("unknown shift kind '" + text +
                    "' (expected gaussian_noise, feature_dropout, mean_shift, covariance_scale "
                    "or label_prior_shift)");
}

void ShiftSpec::Validate() const {
  if (severity < 1 || severity > 5)
    throw ConfigError("severity must be in 1..5, got " + std::to_string(severity));
}

std::string ShiftSpec::Id() const { return ToString(kind) + "_s" + std::to_string(severity); }

double SeverityParameter(ShiftKind kind, int severity) {
  ShiftSpec{kind, severity}.Validate();
  static const double kNoise[] = {0.4, 0.8, 1.2, 1.6, 2.0};
  static const double kDropout[] = {0.1, 0.2, 0.3, 0.4, 0.5};
  static const double kShift[] = {0.2, 0.4, 0.6, 0.8, 1.0};
  static const double kScale[] = {1.25, 1.5, 2.0, 2.5, 3.0};
  static const double kPrior[] = {0.8, 0.6, 0.4, 0.25, 0.1};
  const int s = severity - 1;
  switch (kind) {
    case ShiftKind::kGaussianNoise:
      return kNoise[s];
    case ShiftKind::kFeatureDropout:
      return kDropout[s];
    case ShiftKind::kMeanShift:
      return kShift[s];
    case ShiftKind::kCovarianceScale:
      return kScale[s];
    case ShiftKind::kLabelPriorShift:
      return kPrior[s];
  }
  return 0.0;
}

Dataset ApplyShift(const Dataset& test, std::size_t k, double class_separation,
                   const ShiftSpec& shift, std::uint64_t seed) {
  shift.Validate();
  const double param = SeverityParameter(shift.kind, shift.severity);
  const std::size_t dim = test.features.cols();
  rng::SplitMix64 gen(seed);
  Dataset out = test;
  switch (shift.kind) {
    case ShiftKind::kGaussianNoise:
      for (double& v : out.features.values()) v += param * gen.Normal();
      break;
    case ShiftKind::kFeatureDropout:
      for (double& v : out.features.values())
        if (gen.Uniform() < param) v = 0.0;
      break;
    case ShiftKind::kMeanShift: {
      std::vector<double> dir(dim);
      double norm = 0.0;
      while (norm == 0.0) {
        for (double& v : dir) v = gen.Normal();
        norm = std::sqrt(std::inner_product(dir.begin(), dir.end(), dir.begin(), 0.0));
      }
      const double magnitude = param * class_separation;
      for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t f = 0; f < dim; ++f) out.features(i, f) += magnitude * dir[f] / norm;
      break;
    }
    case ShiftKind::kCovarianceScale: {
      const auto by_class = IndicesByClass(test, k);
      for (std::size_t c = 0; c < k; ++c) {
        if (by_class[c].empty()) continue;
        std::vector<double> mean(dim, 0.0);
        for (std::size_t i : by_class[c])
          for (std::size_t f = 0; f < dim; ++f) mean[f] += test.features(i, f);
        for (double& m : mean) m /= static_cast<double>(by_class[c].size());
        for (std::size_t i : by_class[c])
          for (std::size_t f = 0; f < dim; ++f)
            out.features(i, f) = mean[f] + param * (test.features(i, f) - mean[f]);
      }
      break;
    }
    case ShiftKind::kLabelPriorShift: {
      const auto by_class = IndicesByClass(test, k);
      std::vector<std::size_t> keep;
      for (std::size_t c = 0; c < k; ++c) {
        const double exponent =
            static_cast<double>(k - 1 - c) / static_cast<double>(k - 1);
        const double fraction = std::pow(param, exponent);
        const auto count = static_cast<std::size_t>(
            std::lround(fraction * static_cast<double>(by_class[c].size())));
        const auto chosen = Choose(by_class[c], count, gen);
        keep.insert(keep.end(), chosen.begin(), chosen.end());
      }
      std::sort(keep.begin(), keep.end());
      out = Subset(test, keep);
      break;
    }
  }
  if (shift.kind == ShiftKind::kGaussianNoise || shift.kind == ShiftKind::kCovarianceScale)
    RestoreMeanSquaredNorm(test.features, out.features);
  return out;
}

void ImbalanceSpec::Validate() const {
  if (!(ratio_m > 0.0 && ratio_m <= 1.0))
    throw ConfigError("imbalance ratio must lie in (0, 1], got " + io::FormatDouble(ratio_m));
}

namespace {

std::vector<double> ImbalanceProfile(std::size_t k, double m) {
  std::vector<double> w(k);
  for (std::size_t j = 0; j < k; ++j)
    w[j] = std::pow(m, static_cast<double>(j) / static_cast<double>(k - 1));
  return w;
}

}  // namespace

std::vector<std::size_t> ImbalanceCounts(std::size_t k, const ImbalanceSpec& spec) {
  spec.Validate();
  if (k < 2) throw ConfigError("imbalance needs k >= 2");
  if (spec.head_count == 0) throw ConfigError("imbalance head count must be positive");
  const auto w = ImbalanceProfile(k, spec.ratio_m);
  const double mass = std::accumulate(w.begin(), w.end(), 0.0);
  const auto total =
      static_cast<std::size_t>(std::llround(static_cast<double>(spec.head_count) * mass));
  return numerics::LargestRemainder(w, total);
}

Dataset ApplyImbalance(const Dataset& test, std::size_t k, const ImbalanceSpec& spec,
                       std::uint64_t seed) {
  spec.Validate();
  const auto by_class = IndicesByClass(test, k);
  auto fits = [&](const std::vector<std::size_t>& counts) {
    for (std::size_t c = 0; c < k; ++c)
      if (counts[c] > by_class[c].size()) return false;
    return true;
  };
  ImbalanceSpec resolved = spec;
  if (resolved.head_count == 0) {
    const auto w = ImbalanceProfile(k, spec.ratio_m);
    std::size_t head = SIZE_MAX;
    for (std::size_t c = 0; c < k; ++c)
      head = std::min(head, static_cast<std::size_t>(
                                std::floor(static_cast<double>(by_class[c].size()) / w[c])));
    while (head > 0) {
      resolved.head_count = head;
      if (fits(ImbalanceCounts(k, resolved))) break;
      --head;
    }
    if (head == 0) throw DataError("test set cannot supply any imbalanced subsample");
  }
  const auto counts = ImbalanceCounts(k, resolved);
  for (std::size_t c = 0; c < k; ++c)
    if (counts[c] > by_class[c].size())
      throw DataError("imbalance needs " + std::to_string(counts[c]) + " samples of class " +
                      std::to_string(c) + ", only " + std::to_string(by_class[c].size()) +
                      " available");
  rng::SplitMix64 gen(seed);
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < k; ++c) {
    const auto chosen = Choose(by_class[c], counts[c], gen);
    keep.insert(keep.end(), chosen.begin(), chosen.end());
  }
  std::sort(keep.begin(), keep.end());
  return Subset(test, keep);
}

std::vector<ModelSpec> ModelPool(std::size_t count, std::size_t dim, std::uint64_t seed) {
  static const std::size_t kEpochs[] = {400, 600};
  static const double kRateFractions[] = {1.0, 0.75};
  std::vector<ModelSpec> pool;
  for (std::size_t i = 0; i < count; ++i) {
    ModelSpec spec;
    spec.id = "model_" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    rng::SplitMix64 gen(rng::DeriveSeed(seed, kModelStream + i));
    spec.train.seed = gen.Next();
    spec.train.epochs = kEpochs[i % 2];
    spec.train.rate_fraction = kRateFractions[(i / 2) % 2];
    // Feature budgets fall evenly from all features to 35 % of them.
    const double frac =
        count == 1 ? 1.0 : 1.0 - 0.65 * static_cast<double>(i) / static_cast<double>(count - 1);
    const auto used = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(frac * static_cast<double>(dim))));
    if (used < dim) spec.train.features = Choose(AllFeatures(dim), used, gen);
    pool.push_back(std::move(spec));
  }
  return pool;
}

void SuiteSpec::Validate() const {
  task.Validate();
  if (shifts.empty()) throw ConfigError("suite needs at least one shift");
  for (const auto& s : shifts) s.Validate();
  if (imbalance) imbalance->Validate();
  if (mode == StudyMode::kDatasetCentric) {
    if (models != 1) throw ConfigError("dataset-centric suites use exactly one model");
    if (shifts.size() < 3)
      throw ConfigError("dataset-centric suites need at least 3 shifted sets");
  } else {
    if (shifts.size() != 1) throw ConfigError("model-centric suites use exactly one shift");
    if (models < 3) throw ConfigError("model-centric suites need at least 3 models");
  }
}

Suite BuildSuite(const SuiteSpec& spec) {
  spec.Validate();
  const Task task = GenerateTask(spec.task);
  const std::size_t k = spec.task.k;
  const std::uint64_t seed = spec.task.seed;

  std::vector<ModelSpec> models;
  if (spec.mode == StudyMode::kDatasetCentric) {
    ModelSpec single;
    single.id = "model_00";
    single.train.epochs = spec.epochs;
    single.train.seed = rng::DeriveSeed(seed, kModelStream);
    models.push_back(std::move(single));
  } else {
    models = ModelPool(spec.models, spec.task.dim, seed);
  }

  std::vector<std::optional<LinearModel>> trained(models.size());
  study::ParallelFor(models.size(), spec.threads, [&](std::size_t i) {
    trained[i] = TrainLinearSoftmax(task.train, k, models[i].train).model;
  });

  std::vector<std::optional<Dataset>> sets(spec.shifts.size());
  study::ParallelFor(spec.shifts.size(), spec.threads, [&](std::size_t i) {
    Dataset shifted = ApplyShift(task.test, k, spec.task.class_separation, spec.shifts[i],
                                 rng::DeriveSeed(seed, kShiftStream + i));
    if (spec.imbalance)
      shifted = ApplyImbalance(shifted, k, *spec.imbalance,
                               rng::DeriveSeed(seed, kImbalanceStream + i));
    sets[i] = std::move(shifted);
  });

  Suite suite;
  suite.mode = spec.mode;
  const std::size_t cells = models.size() * sets.size();
  std::vector<std::optional<SuiteEntry>> entries(cells);
  study::ParallelFor(cells, spec.threads, [&](std::size_t c) {
    const std::size_t m = c / sets.size(), s = c % sets.size();
    LogitMatrix logits = trained[m]->Logits(sets[s]->features);
    PredictionMatrix preds = Softmax(logits);
    entries[c] = SuiteEntry{models[m].id, spec.shifts[s].Id(), std::move(logits),
                            std::move(preds), sets[s]->Labels()};
  });
  for (auto& e : entries) suite.entries.push_back(std::move(*e));
  for (std::size_t m = 0; m < models.size(); ++m)
    suite.validation.push_back(SuiteValidation{
        models[m].id, Softmax(trained[m]->Logits(task.validation.features)),
        task.validation.Labels()});
  return suite;
}

study::LoadedStudy ToLoadedStudy(const Suite& suite) {
  study::LoadedStudy loaded;
  loaded.mode = suite.mode;
  for (const auto& e : suite.entries)
    loaded.entries.push_back(study::LoadedEntry{e.model_id, e.dataset_id, e.preds, e.logits,
                                                e.labels});
  for (const auto& v : suite.validation)
    loaded.validation[v.model_id] = metrics::CalibrateAtc(v.preds, v.labels);
  return loaded;
}

Manifest EmitSuite(const Suite& suite, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "validation", ec);
  if (ec) throw DataError("cannot create " + out_dir.string() + ": " + ec.message());
  Manifest manifest;
  manifest.mode = suite.mode;
  for (const auto& e : suite.entries) {
    const std::string stem = e.model_id + "__" + e.dataset_id;
    ManifestEntry entry{e.model_id, e.dataset_id, stem + ".preds.csv", stem + ".logits.csv",
                        stem + ".labels.csv"};
    io::SaveMatrixCsv(out_dir / entry.predictions_path, e.preds.data());
    io::SaveMatrixCsv(out_dir / *entry.logits_path, e.logits.data());
    io::SaveLabelsCsv(out_dir / *entry.labels_path, e.labels);
    manifest.entries.push_back(std::move(entry));
  }
  for (const auto& v : suite.validation) {
    ValidationSource source{"validation/" + v.model_id + ".preds.csv",
                            "validation/" + v.model_id + ".labels.csv"};
    io::SaveMatrixCsv(out_dir / source.predictions_path, v.preds.data());
    io::SaveLabelsCsv(out_dir / source.labels_path, v.labels);
    manifest.validation.emplace_back(v.model_id, std::move(source));
  }
  std::sort(manifest.validation.begin(), manifest.validation.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  io::SaveManifest(out_dir / "manifest.json", manifest);
  return manifest;
}

}  // namespace predmat::synth
