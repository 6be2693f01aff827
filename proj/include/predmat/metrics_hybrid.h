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

#ifndef PREDMAT_METRICS_HYBRID_H_
#define PREDMAT_METRICS_HYBRID_H_

#include <cstddef>
#include <string>

#include "predmat/core.h"
#include "predmat/transport.h"

namespace predmat::metrics {

enum class PriorOrigin { kUniform, kFile };

std::string ToString(PriorOrigin origin);

// Prior class distribution used by COT and SoftmaxCorr.
struct PriorDistribution {
  numerics::Histogram d;
  PriorOrigin origin = PriorOrigin::kUniform;

  static PriorDistribution Uniform(std::size_t k) {
    return {numerics::Histogram::Uniform(k), PriorOrigin::kUniform};
  }
};

// H(marginal) − mean H(rows), in [−ln k, ln k].
double ImScore(const PredictionMatrix& preds);

// Nuclear norm divided by sqrt(min(n, k)·n), in (0, 1].
double NuclearNormScore(const PredictionMatrix& preds);

enum class CotAggregation { kMean, kMax };
enum class CotSolver { kAuto, kExact, kEntropic };

std::string ToString(CotAggregation aggregation);
CotAggregation ParseCotAggregation(const std::string& text);
std::string ToString(CotSolver solver);
CotSolver ParseCotSolver(const std::string& text);

struct CotOptions {
  CotAggregation aggregation = CotAggregation::kMean;
  CotSolver solver = CotSolver::kAuto;
  // kAuto uses the exact solver up to this many samples.
  std::size_t exact_limit = 2000;
  double entropic_epsilon = 1e-2;
  int entropic_max_iter = 20000;
};

struct CotResult {
  double value = 0.0;
  // "exact", "entropic" or "bottleneck".
  std::string solver;
};

// Optimal transport between the prediction rows and n reference one-hot
// vectors whose class counts are the largest-remainder apportionment of
// n·prior, under the ℓ∞ ground cost ‖p_i − e_j‖_∞. kMean reports the
// per-sample mean transport cost, kMax the bottleneck (largest matched
// cost). Lower is better.
CotResult Cot(const PredictionMatrix& preds, const PriorDistribution& prior,
              const CotOptions& options = {});
double CotScore(const PredictionMatrix& preds, const PriorDistribution& prior);

// Reference one-hot class counts for COT, sorted by class index.
std::vector<std::size_t> CotReferenceCounts(std::size_t n, const PriorDistribution& prior);
// ‖p − e_c‖_∞.
double OneHotLinfDistance(std::span<const double> p, std::size_t c);

// Cosine similarity between C = PᵀP / n and diag(prior).
double SoftmaxCorr(const PredictionMatrix& preds, const PriorDistribution& prior);

}  // namespace predmat::metrics

#endif  // PREDMAT_METRICS_HYBRID_H_
