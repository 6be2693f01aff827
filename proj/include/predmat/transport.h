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

#ifndef PREDMAT_TRANSPORT_H_
#define PREDMAT_TRANSPORT_H_

#include <cstddef>
#include <span>
#include <vector>

#include "predmat/matrix.h"

namespace predmat::numerics {

// Nonnegative masses summing to one (within 1e-9).
class Histogram {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit Histogram(std::vector<double> mass);
  static Histogram Uniform(std::size_t k);
  // Normalizes arbitrary nonnegative weights (not all zero).
  static Histogram FromWeights(std::span<const double> weights);
  // Empirical histogram of class indices drawn from [0, k).
  static Histogram FromCounts(std::span<const std::size_t> counts);

  std::size_t size() const { return mass_.size(); }
  double operator[](std::size_t i) const { return mass_[i]; }
  std::span<const double> mass() const { return mass_; }

 private:
  std::vector<double> mass_;
};

// Finite, nonnegative ground costs.
class CostMatrix {
 public:
  explicit CostMatrix(Matrix cost);
  // cost(i, j) = |i − j| over class indices.
  static CostMatrix AbsoluteIndexDistance(std::size_t k);

  std::size_t rows() const { return cost_.rows(); }
  std::size_t cols() const { return cost_.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return cost_(i, j); }
  const Matrix& matrix() const { return cost_; }

 private:
  Matrix cost_;
};

// Exact 1-D optimal transport for cost |i − j|: Σ_c |CDF_t(c) − CDF_s(c)|.
double Emd1d(const Histogram& target, const Histogram& source);

struct TransportPlan {
  double total_cost = 0.0;
  Matrix plan;
  int pivots = 0;
};

// Exact discrete optimal transport by the transportation simplex (MODI
// potentials, northwest-corner start). Supplies and demands are arbitrary
// nonnegative vectors whose totals agree within 1e-9; DataError otherwise.
TransportPlan OtExact(const CostMatrix& cost, std::span<const double> supply,
                      std::span<const double> demand);

struct EntropicResult {
  double total_cost = 0.0;   // ⟨plan, cost⟩, entropy term excluded
  double marginal_violation = 0.0;
  int iterations = 0;
};

// Log-domain Sinkhorn iterations for entropic OT. Converged when the L1 row
// and column marginal violation falls below tolerance; NumericalError if
// that does not happen within max_iter. ConfigError if epsilon <= 0.
EntropicResult OtEntropic(const CostMatrix& cost, std::span<const double> supply,
                          std::span<const double> demand, double epsilon, int max_iter,
                          double tolerance = 1e-9);

// Integer counts summing to total, proportional to weights: floors first,
// then the remaining units go to the largest fractional remainders (ties to
// the lower index).
std::vector<std::size_t> LargestRemainder(std::span<const double> weights, std::size_t total);

// Bottleneck version of the capacitated assignment behind OtExact when every
// supply is one unit: rows are assigned to columns with the given integer
// capacities (summing to the row count) minimizing the largest used cost.
double BottleneckAssignment(const CostMatrix& cost, std::span<const std::size_t> capacity);

}  // namespace predmat::numerics

#endif  // PREDMAT_TRANSPORT_H_
