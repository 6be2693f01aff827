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

#include "predmat/metrics_dispersity.h"

#include "predmat/error.h"
#include "predmat/metrics_confidence.h"

namespace predmat::metrics {

std::string ToString(HistogramOrigin origin) {
  return origin == HistogramOrigin::kUniform ? "uniform" : "user_supplied";
}

std::vector<double> MarginalDistribution(const PredictionMatrix& preds) {
  std::vector<double> marginal(preds.k(), 0.0);
  for (std::size_t i = 0; i < preds.n(); ++i) {
    auto r = preds.row(i);
    for (std::size_t j = 0; j < preds.k(); ++j) marginal[j] += r[j];
  }
  for (double& v : marginal) v /= static_cast<double>(preds.n());
  return marginal;
}

double ClassEntropy(const PredictionMatrix& preds) {
  return ShannonEntropy(MarginalDistribution(preds));
}

double CtdScore(const PredictionMatrix& preds, const SourceHistogram& source) {
  if (source.mass.size() != preds.k())
    throw DataError("CTD: source histogram has " + std::to_string(source.mass.size()) +
                    " classes, predictions have " + std::to_string(preds.k()));
  const auto counts = PredictedClassCounts(preds);
  return numerics::Emd1d(numerics::Histogram::FromCounts(counts), source.mass);
}

}  // namespace predmat::metrics
