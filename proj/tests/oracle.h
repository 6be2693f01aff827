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

#ifndef PREDMAT_TESTS_ORACLE_H_
#define PREDMAT_TESTS_ORACLE_H_

// Reference implementations used only by tests. They share no code with
// the library and favor transparency over speed.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using Rows = std::vector<std::vector<double>>;

// Standard normal CDF from its Maclaurin series, in long double.
double SeriesNormalCdf(double x);
// Inverse of SeriesNormalCdf by bisection on [-12, 12].
double BisectInvNormCdf(double p);

// Singular values of an arbitrary matrix by one-sided Jacobi rotations on
// its columns, descending.
std::vector<double> JacobiSingularValues(const Rows& a);

// Costs of every vertex plan of the 3×3 transportation polytope with the
// given marginals. Vertices are enumerated as spanning-tree bases of the
// bipartite supply/demand graph.
std::vector<double> TransportVertexCosts3x3(const Rows& cost, const std::vector<double>& supply,
                                            const std::vector<double>& demand);

// max-norm distance between a probability row and the one-hot vector e_c.
double LinfToOneHot(const std::vector<double>& p, std::size_t c);

// Reference counts realizing weights over `total` slots: floors first, then
// the largest fractional parts, ties to the lower class.
std::vector<std::size_t> Apportion(const std::vector<double>& weights, std::size_t total);

// Mean per-sample cost of the best one-to-one matching of prediction rows
// to reference one-hots, by enumerating every assignment. n ≤ 8.
double CotByEnumeration(const Rows& preds, const std::vector<double>& prior);

// Weighted Kendall correlation by direct pair enumeration, with item weight
// 1/(r + 1) for r the 0-based descending average rank of ys.
double WeightedKendallByPairs(const std::vector<double>& xs, const std::vector<double>& ys);

// 1 − 6Σd²/(n(n²−1)) for tie-free data.
double SpearmanByRankDifferences(const std::vector<double>& xs, const std::vector<double>& ys);

// Random helpers.
Rows RandomMatrix(std::mt19937_64& gen, std::size_t n, std::size_t k, double lo, double hi);
// Rows drawn from softmax(scale·N(0,1)).
Rows RandomStochastic(std::mt19937_64& gen, std::size_t n, std::size_t k, double scale = 2.0);
std::vector<double> RandomHistogram(std::mt19937_64& gen, std::size_t k);

}  // namespace oracle

#endif  // PREDMAT_TESTS_ORACLE_H_
