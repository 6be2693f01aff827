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

#ifndef PREDMAT_METRICS_DISPERSITY_H_
#define PREDMAT_METRICS_DISPERSITY_H_

#include <string>

#include "predmat/core.h"
#include "predmat/transport.h"

namespace predmat::metrics {

enum class HistogramOrigin { kUniform, kUserSupplied };

std::string ToString(HistogramOrigin origin);

// Reference label histogram for the class transport distance.
struct SourceHistogram {
  numerics::Histogram mass;
  HistogramOrigin origin = HistogramOrigin::kUniform;

  static SourceHistogram Uniform(std::size_t k) {
    return {numerics::Histogram::Uniform(k), HistogramOrigin::kUniform};
  }
};

// Column means of the prediction matrix.
std::vector<double> MarginalDistribution(const PredictionMatrix& preds);

// Entropy of the marginal predicted distribution, in [0, ln k].
double ClassEntropy(const PredictionMatrix& preds);

// Earth mover's distance (cost |i − j| over class indices) between the
// top-1 prediction histogram and the source histogram. Lower is better.
double CtdScore(const PredictionMatrix& preds, const SourceHistogram& source);

}  // namespace predmat::metrics

#endif  // PREDMAT_METRICS_DISPERSITY_H_
