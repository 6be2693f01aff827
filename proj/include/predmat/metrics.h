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

#ifndef PREDMAT_METRICS_H_
#define PREDMAT_METRICS_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "predmat/core.h"
#include "predmat/metrics_confidence.h"
#include "predmat/metrics_dispersity.h"
#include "predmat/metrics_hybrid.h"

namespace predmat::metrics {

enum class Metric {
  kConfScore,
  kEntropy,
  kAtc,
  kAvgEnergy,
  kDoc,
  kMano,
  kClassEntropy,
  kCtd,
  kNuclearNorm,
  kCot,
  kSoftmaxCorr,
  kIm,
};

enum class Category { kConfidence, kDispersity, kHybrid };

// How a metric value is mapped onto [0, 1] before the probit axis scaling.
enum class ProbitPolicy {
  kNone,         // correlated raw
  kFraction,     // already in [0, 1]
  kClampUnit,    // clamped into [0, 1] first (DoC)
  kDivideByK,    // CTD / k
};

struct MetricInfo {
  Metric id;
  std::string_view name;
  Category category;
  // +1 when higher values should accompany higher accuracy, −1 otherwise.
  int expected_sign;
  ProbitPolicy probit;
  bool needs_logits;
  bool needs_validation;
};

// All twelve metrics in canonical report order.
const std::array<MetricInfo, 12>& AllMetrics();
const MetricInfo& Info(Metric m);
std::string_view Name(Metric m);
std::string ToString(Category c);
// ConfigError on an unknown name.
Metric ParseMetric(std::string_view name);
std::vector<Metric> ParseMetricList(const std::string& comma_separated);

struct MetricOptions {
  ConfidenceConfig confidence;
  CotOptions cot;
  // Allow ln(p + 1e-12) logits when only probabilities are available.
  bool reconstruct_logits = false;
};

// Everything one (model, test set) evaluation can draw on. Pointers are
// non-owning and may be null when the input is absent.
struct MetricInputs {
  const PredictionMatrix* preds = nullptr;
  const LogitMatrix* logits = nullptr;
  const ValidationStats* validation = nullptr;
  const PriorDistribution* prior = nullptr;
  const SourceHistogram* source = nullptr;
};

struct MetricValue {
  double value = 0.0;
  bool logits_reconstructed = false;
  std::string cot_solver;
};

// ConfigError if the metric needs logits (and reconstruction is off) or
// validation statistics that are not supplied.
MetricValue EvaluateMetric(Metric metric, const MetricInputs& inputs,
                           const MetricOptions& options);

// Throws ConfigError naming every missing input for the requested metrics.
void CheckMetricInputs(const std::vector<Metric>& metrics, bool have_logits,
                       bool have_validation, const MetricOptions& options);

// The metrics computable from the given inputs, in canonical order.
std::vector<Metric> DefaultMetrics(bool have_logits, bool have_validation,
                                   const MetricOptions& options);

}  // namespace predmat::metrics

#endif  // PREDMAT_METRICS_H_
