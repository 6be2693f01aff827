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

#include "predmat/metrics.h"

#include <sstream>

#include "predmat/error.h"

namespace predmat::metrics {

const std::array<MetricInfo, 12>& AllMetrics() {
  using C = Category;
  using P = ProbitPolicy;
  static const std::array<MetricInfo, 12> kMetrics = {{
      {Metric::kConfScore, "conf_score", C::kConfidence, +1, P::kFraction, false, false},
      {Metric::kEntropy, "entropy", C::kConfidence, +1, P::kNone, false, false},
      {Metric::kAtc, "atc", C::kConfidence, +1, P::kFraction, false, true},
      {Metric::kAvgEnergy, "avg_energy", C::kConfidence, +1, P::kNone, true, false},
      {Metric::kDoc, "doc", C::kConfidence, +1, P::kClampUnit, false, true},
      {Metric::kMano, "mano", C::kConfidence, +1, P::kFraction, true, false},
      {Metric::kClassEntropy, "class_entropy", C::kDispersity, +1, P::kNone, false, false},
      {Metric::kCtd, "ctd", C::kDispersity, -1, P::kDivideByK, false, false},
      {Metric::kNuclearNorm, "nuclear_norm", C::kHybrid, +1, P::kFraction, false, false},
      {Metric::kCot, "cot", C::kHybrid, -1, P::kFraction, false, false},
      {Metric::kSoftmaxCorr, "softmax_corr", C::kHybrid, +1, P::kFraction, false, false},
      {Metric::kIm, "im", C::kHybrid, +1, P::kNone, false, false},
  }};
  return kMetrics;
}

const MetricInfo& Info(Metric m) { return AllMetrics()[static_cast<std::size_t>(m)]; }

std::string_view Name(Metric m) { return Info(m).name; }

std::string ToString(Category c) {
  switch (c) {
    case Category::kConfidence:
      return "confidence";
    case Category::kDispersity:
      return "dispersity";
    case Category::kHybrid:
      return "hybrid";
  }
  return "unknown";
}

Metric ParseMetric(std::string_view name) {
  for (const auto& info : AllMetrics())
    if (info.name == name) return info.id;
  throw ConfigError("unknown metric '" + std::string(name) + "'");
}

std::vector<Metric> ParseMetricList(const std::string& comma_separated) {
  std::vector<Metric> out;
  std::stringstream in(comma_separated);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    if (item == "all") {
      for (const auto& info : AllMetrics()) out.push_back(info.id);
      continue;
    }
    out.push_back(ParseMetric(item));
  }
  // Canonical order, no duplicates.
  std::vector<Metric> canonical;
  for (const auto& info : AllMetrics())
    for (Metric m : out)
      if (m == info.id) {
        canonical.push_back(m);
        break;
      }
  if (canonical.empty()) throw ConfigError("empty metric list");
  return canonical;
}

void CheckMetricInputs(const std::vector<Metric>& metrics, bool have_logits,
                       bool have_validation, const MetricOptions& options) {
  std::vector<std::string> missing;
  for (Metric m : metrics) {
    const auto& info = Info(m);
    if (info.needs_validation && !have_validation)
      missing.push_back(std::string(info.name) +
                        " needs validation predictions and labels (--val-preds, --val-labels)");
    if (info.needs_logits && !have_logits && !options.reconstruct_logits)
      missing.push_back(std::string(info.name) +
                        " needs logits (--logits) or --reconstruct-logits");
  }
  if (missing.empty()) return;
  std::string message = "missing inputs:";
  for (const auto& s : missing) message += "\n  " + s;
  throw ConfigError(message);
}

std::vector<Metric> DefaultMetrics(bool have_logits, bool have_validation,
                                   const MetricOptions& options) {
  std::vector<Metric> out;
  for (const auto& info : AllMetrics()) {
    if (info.needs_validation && !have_validation) continue;
    if (info.needs_logits && !have_logits && !options.reconstruct_logits) continue;
    out.push_back(info.id);
  }
  return out;
}

MetricValue EvaluateMetric(Metric metric, const MetricInputs& inputs,
                           const MetricOptions& options) {
  if (inputs.preds == nullptr) throw ConfigError("metric evaluation without predictions");
  const PredictionMatrix& preds = *inputs.preds;
  const auto& info = Info(metric);
  if (info.needs_validation && inputs.validation == nullptr)
    throw ConfigError(std::string(info.name) + " needs validation statistics");

  MetricValue out;
  std::optional<LogitMatrix> reconstructed;
  const LogitMatrix* logits = inputs.logits;
  if (info.needs_logits && logits == nullptr) {
    if (!options.reconstruct_logits)
      throw ConfigError(std::string(info.name) + " needs logits or --reconstruct-logits");
    reconstructed.emplace(ReconstructLogits(preds));
    logits = &*reconstructed;
    out.logits_reconstructed = true;
  }
  if (logits != nullptr && info.needs_logits &&
      (logits->n() != preds.n() || logits->k() != preds.k()))
    throw DataError("logit matrix shape does not match the prediction matrix");

  const PriorDistribution uniform_prior = PriorDistribution::Uniform(preds.k());
  const SourceHistogram uniform_source = SourceHistogram::Uniform(preds.k());
  const PriorDistribution& prior = inputs.prior ? *inputs.prior : uniform_prior;
  const SourceHistogram& source = inputs.source ? *inputs.source : uniform_source;

  switch (metric) {
    case Metric::kConfScore:
      out.value = ConfScore(preds);
      break;
    case Metric::kEntropy:
      out.value = NegEntropy(preds);
      break;
    case Metric::kAtc:
      out.value = AtcScore(preds, *inputs.validation);
      break;
    case Metric::kAvgEnergy:
      out.value = AvgEnergy(*logits, options.confidence);
      break;
    case Metric::kDoc:
      out.value = DocScore(preds, *inputs.validation);
      break;
    case Metric::kMano:
      out.value = ManoScore(*logits, options.confidence);
      break;
    case Metric::kClassEntropy:
      out.value = ClassEntropy(preds);
      break;
    case Metric::kCtd:
      out.value = CtdScore(preds, source);
      break;
    case Metric::kNuclearNorm:
      out.value = NuclearNormScore(preds);
      break;
    case Metric::kCot: {
      auto cot = Cot(preds, prior, options.cot);
      out.value = cot.value;
      out.cot_solver = std::move(cot.solver);
      break;
    }
    case Metric::kSoftmaxCorr:
      out.value = SoftmaxCorr(preds, prior);
      break;
    case Metric::kIm:
      out.value = ImScore(preds);
      break;
  }
  return out;
}

}  // namespace predmat::metrics
