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

#include "predmat/metrics_hybrid.h"

#include <algorithm>
#include <cmath>

#include "predmat/eigen.h"
#include "predmat/error.h"
#include "predmat/metrics_confidence.h"
#include "predmat/metrics_dispersity.h"

namespace predmat::metrics {

std::string ToString(PriorOrigin origin) {
  return origin == PriorOrigin::kUniform ? "uniform" : "file";
}

std::string ToString(CotAggregation aggregation) {
  return aggregation == CotAggregation::kMean ? "mean" : "max";
}

CotAggregation ParseCotAggregation(const std::string& text) {
  if (text == "mean") return CotAggregation::kMean;
  if (text == "max") return CotAggregation::kMax;
  throw ConfigError("cot_aggregation must be 'mean' or 'max', got '" + text + "'");
}

std::string ToString(CotSolver solver) {
  switch (solver) {
    case CotSolver::kAuto:
      return "auto";
    case CotSolver::kExact:
      return "exact";
    case CotSolver::kEntropic:
      return "entropic";
  }
  return "unknown";
}

CotSolver ParseCotSolver(const std::string& text) {
  if (text == "auto") return CotSolver::kAuto;
  if (text == "exact") return CotSolver::kExact;
  if (text == "entropic") return CotSolver::kEntropic;
  throw ConfigError("cot_solver must be 'auto', 'exact' or 'entropic', got '" + text + "'");
}

double ImScore(const PredictionMatrix& preds) {
  return ClassEntropy(preds) + NegEntropy(preds);
}

double NuclearNormScore(const PredictionMatrix& preds) {
  const double n = static_cast<double>(preds.n());
  const double k = static_cast<double>(preds.k());
  return numerics::NuclearNormRaw(preds.data()) / std::sqrt(std::min(n, k) * n);
}

std::vector<std::size_t> CotReferenceCounts(std::size_t n, const PriorDistribution& prior) {
  return numerics::LargestRemainder(prior.d.mass(), n);
}

double OneHotLinfDistance(std::span<const double> p, std::size_t c) {
  double d = std::abs(1.0 - p[c]);
  for (std::size_t j = 0; j < p.size(); ++j)
    if (j != c) d = std::max(d, std::abs(p[j]));
  return d;
}

CotResult Cot(const PredictionMatrix& preds, const PriorDistribution& prior,
              const CotOptions& options) {
  const std::size_t n = preds.n();
  if (prior.d.size() != preds.k())
    throw DataError("COT: prior has " + std::to_string(prior.d.size()) +
                    " classes, predictions have " + std::to_string(preds.k()));
  const auto counts = CotReferenceCounts(n, prior);
  std::vector<std::size_t> classes;
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] > 0) classes.push_back(c);

  Matrix cost(n, classes.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < classes.size(); ++j)
      cost(i, j) = OneHotLinfDistance(preds.row(i), classes[j]);
  const numerics::CostMatrix ground(std::move(cost));

  CotResult result;
  if (options.aggregation == CotAggregation::kMax) {
    std::vector<std::size_t> capacity;
    for (std::size_t c : classes) capacity.push_back(counts[c]);
    result.value = numerics::BottleneckAssignment(ground, capacity);
    result.solver = "bottleneck";
    return result;
  }

  const bool exact = options.solver == CotSolver::kExact ||
                     (options.solver == CotSolver::kAuto && n <= options.exact_limit);
  if (exact) {
    // Unit supplies and integer demands keep every simplex flow integral.
    std::vector<double> supply(n, 1.0), demand;
    for (std::size_t c : classes) demand.push_back(static_cast<double>(counts[c]));
    const auto plan = numerics::OtExact(ground, supply, demand);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < classes.size(); ++j)
        if (plan.plan(i, j) > 0.0) total += plan.plan(i, j) * ground(i, j);
    result.value = total / static_cast<double>(n);
    result.solver = "exact";
  } else {
    std::vector<double> supply(n, 1.0 / static_cast<double>(n)), demand;
    for (std::size_t c : classes)
      demand.push_back(static_cast<double>(counts[c]) / static_cast<double>(n));
    const auto entropic = numerics::OtEntropic(ground, supply, demand, options.entropic_epsilon,
                                               options.entropic_max_iter, 1e-6);
    result.value = entropic.total_cost;
    result.solver = "entropic";
  }
  return result;
}

double CotScore(const PredictionMatrix& preds, const PriorDistribution& prior) {
  return Cot(preds, prior).value;
}

double SoftmaxCorr(const PredictionMatrix& preds, const PriorDistribution& prior) {
  if (prior.d.size() != preds.k())
    throw DataError("SoftmaxCorr: prior has " + std::to_string(prior.d.size()) +
                    " classes, predictions have " + std::to_string(preds.k()));
  Matrix c = preds.data().Gram();
  for (double& v : c.values()) v /= static_cast<double>(preds.n());
  double inner = 0.0, prior_norm = 0.0;
  for (std::size_t j = 0; j < preds.k(); ++j) {
    inner += c(j, j) * prior.d[j];
    prior_norm += prior.d[j] * prior.d[j];
  }
  if (prior_norm <= 0.0) throw DataError("SoftmaxCorr: prior is all zero");
  return inner / (c.FrobeniusNorm() * std::sqrt(prior_norm));
}

}  // namespace predmat::metrics
