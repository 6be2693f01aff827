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

#ifndef PREDMAT_STUDY_H_
#define PREDMAT_STUDY_H_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "predmat/core.h"
#include "predmat/metrics.h"

namespace predmat::study {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolName = "predmat";
inline constexpr const char* kToolVersion = "0.1.0";

enum class Transform { kProbit, kRaw };
enum class GroundTruth { kAccuracy, kMacroF1 };

std::string ToString(Transform t);
Transform ParseTransform(const std::string& text);
std::string ToString(GroundTruth g);
GroundTruth ParseGroundTruth(const std::string& text);

struct StudyConfig {
  // Empty selects every metric the inputs support.
  std::vector<metrics::Metric> metrics;
  metrics::MetricOptions options;
  std::optional<std::string> prior_path;
  std::optional<std::string> source_hist_path;
  // Single-model validation split; overrides the manifest's entry for the
  // model. Dataset-centric studies only.
  std::optional<std::string> val_predictions_path;
  std::optional<std::string> val_labels_path;
  std::map<metrics::Metric, Transform> transform_overrides;
  GroundTruth ground_truth = GroundTruth::kAccuracy;
  int threads = 1;
  // Studies whose ground truth spans less than this are flagged.
  double min_truth_range = 0.10;

  nlohmann::json ToJson() const;
};

// Default axis scaling for a metric: probit when its values live in [0, 1].
Transform DefaultTransform(metrics::Metric m);
// Maps a raw metric value into [0, 1] as its probit policy requires.
double ToUnitInterval(metrics::Metric m, double value, std::size_t k);

struct StudyPoint {
  std::string subject_id;
  double metric_value = 0.0;
  double metric_transformed = 0.0;
  double ground_truth = 0.0;
  double truth_transformed = 0.0;
};

struct StudyResult {
  std::string metric_name;
  metrics::Category category = metrics::Category::kConfidence;
  int expected_sign = 1;
  // Display convention for metrics expected to fall with accuracy; stored
  // statistics are never negated.
  bool negated = false;
  Transform transform = Transform::kRaw;
  bool ok = false;
  std::string error;
  double pearson_r = 0.0;
  double spearman_rho = 0.0;
  double kendall_tau_w = 0.0;
  double r_squared = 0.0;
  double fit_slope = 0.0;
  double fit_intercept = 0.0;
  bool logits_reconstructed = false;
  std::vector<std::string> cot_solvers;
  std::vector<StudyPoint> points;
};

struct RankingTable {
  std::string metric_name;
  // Subject ids ordered best first under the metric's expected sign.
  std::vector<std::pair<std::string, double>> ranked;
};

struct StudyReport {
  StudyMode mode = StudyMode::kDatasetCentric;
  GroundTruth ground_truth = GroundTruth::kAccuracy;
  std::vector<StudyResult> results;
  std::vector<RankingTable> rankings;  // model-centric only
  double truth_range = 0.0;
  bool narrow_truth_range = false;
  std::string prior_origin = "uniform";
  std::string source_hist_origin = "uniform";

  const StudyResult* Find(std::string_view metric_name) const;
};

// In-memory study input: one (model, test set) cell.
struct LoadedEntry {
  std::string model_id;
  std::string dataset_id;
  PredictionMatrix preds;
  std::optional<LogitMatrix> logits;
  std::optional<LabelVector> labels;
};

struct LoadedStudy {
  StudyMode mode = StudyMode::kDatasetCentric;
  std::vector<LoadedEntry> entries;
  std::map<std::string, ValidationStats> validation;  // by model id
  std::optional<metrics::PriorDistribution> prior;
  std::optional<metrics::SourceHistogram> source;
};

// Reads every file the manifest and config reference.
LoadedStudy LoadStudy(const Manifest& manifest, const StudyConfig& config);

// Core study engine. Subjects are test sets (dataset-centric) or models
// (model-centric). NumericalError failures of individual metrics are
// recorded per metric; configuration and data errors propagate.
StudyReport RunStudy(const LoadedStudy& study, const StudyConfig& config);

StudyReport RunDatasetCentric(const Manifest& manifest, const StudyConfig& config);
StudyReport RunModelCentric(const Manifest& manifest, const StudyConfig& config);

nlohmann::json ReportToJson(const StudyReport& report);
// Complete report document with schema version, tool version, command and
// effective configuration.
std::string RenderReport(const StudyReport& report, const std::string& command,
                         const nlohmann::json& effective_config);
// Columns: metric, subject_id, metric_raw, metric_transformed, truth_raw,
// truth_transformed.
std::string ScatterCsv(const StudyReport& report);

// Runs fn(0..count-1) on up to `threads` workers. The exception thrown by
// the lowest failing index is rethrown after all workers finish.
void ParallelFor(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace predmat::study

#endif  // PREDMAT_STUDY_H_
