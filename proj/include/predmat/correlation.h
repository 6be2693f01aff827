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

#ifndef PREDMAT_CORRELATION_H_
#define PREDMAT_CORRELATION_H_

#include <span>
#include <vector>

namespace predmat::correlation {

// Product-moment correlation. NumericalError for n < 3, length mismatch
// or zero variance in either argument.
double Pearson(std::span<const double> xs, std::span<const double> ys);

// Ranks starting at 1; tied values share the mean of their rank span.
std::vector<double> AverageRanks(std::span<const double> values);

// Pearson correlation of average ranks. NumericalError when either input is
// entirely tied or n < 3.
double Spearman(std::span<const double> xs, std::span<const double> ys);

// Weight of the item at descending rank r (0 = largest): 1 / (r + 1).
double HyperbolicWeight(double rank);

// Weighted Kendall correlation. Each item i carries w_i = 1/(r_i + 1) where
// r_i is the 0-based descending rank of ys[i] (ties take the mean rank).
// A pair contributes (w_i + w_j)·sign(dx)·sign(dy); the sum is normalized
// by the total pair weight Σ (w_i + w_j). O(n²).
double KendallTauWeighted(std::span<const double> xs, std::span<const double> ys);

inline constexpr double kProbitClamp = 1e-6;

// With assume_fraction, clamps each value into [1e-6, 1 − 1e-6] and maps it
// through Φ⁻¹ (DataError if a value lies outside [0, 1]); otherwise returns
// the values unchanged.
std::vector<double> ProbitTransform(std::span<const double> values, bool assume_fraction);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares of ys on xs with R² = 1 − SS_res / SS_tot.
// NumericalError for n < 3 or zero variance in xs or ys.
LinearFit LinearFitR2(std::span<const double> xs, std::span<const double> ys);

}  // namespace predmat::correlation

#endif  // PREDMAT_CORRELATION_H_
