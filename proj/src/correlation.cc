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

#include "predmat/correlation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "predmat/error.h"
#include "predmat/normal.h"

namespace predmat::correlation {

namespace {

void CheckPair(std::span<const double> xs, std::span<const double> ys, const char* what) {
  if (xs.size() != ys.size())
    throw DataError(std::string(what) + ": length mismatch (" + std::to_string(xs.size()) +
                         " vs " + std::to_string(ys.size()) + ")");
  if (xs.size() < 3)
    throw NumericalError(std::string(what) + ": need at least 3 points, got " +
                         std::to_string(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
      throw NumericalError(std::string(what) + ": non-finite value at index " + std::to_string(i));
}

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

bool AllTied(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

double Sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

double Pearson(std::span<const double> xs, std::span<const double> ys) {
  CheckPair(xs, ys, "pearson");
  const double mx = Mean(xs), my = Mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw NumericalError("pearson: degenerate variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> AverageRanks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start + 1;
    while (end < n && values[order[end]] == values[order[start]]) ++end;
    // 1-based ranks start+1 .. end share their mean.
    const double rank = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t p = start; p < end; ++p) ranks[order[p]] = rank;
    start = end;
  }
  return ranks;
}

double Spearman(std::span<const double> xs, std::span<const double> ys) {
  CheckPair(xs, ys, "spearman");
  if (AllTied(xs) || AllTied(ys)) throw NumericalError("spearman: all-tied input");
  const auto rx = AverageRanks(xs);
  const auto ry = AverageRanks(ys);
  return Pearson(rx, ry);
}

double HyperbolicWeight(double rank) { return 1.0 / (rank + 1.0); }

double KendallTauWeighted(std::span<const double> xs, std::span<const double> ys) {
  CheckPair(xs, ys, "kendall_tau_weighted");
  if (AllTied(xs) || AllTied(ys)) throw NumericalError("kendall_tau_weighted: all-tied input");
  const std::size_t n = xs.size();
  // Descending 0-based rank of ys: ascending 1-based average rank r maps to
  // n − r.
  const auto ascending = AverageRanks(ys);
  std::vector<double> weight(n);
  for (std::size_t i = 0; i < n; ++i)
    weight[i] = HyperbolicWeight(static_cast<double>(n) - ascending[i]);
  double numerator = 0.0, denominator = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = weight[i] + weight[j];
      numerator += w * Sign(xs[i] - xs[j]) * Sign(ys[i] - ys[j]);
      denominator += w;
    }
  return numerator / denominator;
}

std::vector<double> ProbitTransform(std::span<const double> values, bool assume_fraction) {
  std::vector<double> out(values.begin(), values.end());
  if (!assume_fraction) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = out[i];
    if (!(v >= 0.0 && v <= 1.0))
      throw DataError("probit transform: value " + std::to_string(v) + " at index " +
                      std::to_string(i) + " outside [0, 1]");
    out[i] = numerics::InvNormCdf(std::clamp(v, kProbitClamp, 1.0 - kProbitClamp));
  }
  return out;
}

LinearFit LinearFitR2(std::span<const double> xs, std::span<const double> ys) {
  CheckPair(xs, ys, "linear_fit");
  const double mx = Mean(xs), my = Mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw NumericalError("linear_fit: degenerate x variance");
  if (syy <= 0.0) throw NumericalError("linear_fit: degenerate y variance (SS_tot = 0)");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  return fit;
}

}  // namespace predmat::correlation
