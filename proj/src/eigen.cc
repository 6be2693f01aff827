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

#include "predmat/eigen.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "predmat/error.h"

namespace predmat::numerics {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalTolerance = 1e-12;
constexpr double kSymmetryTolerance = 1e-9;

double OffDiagonalNorm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

SymEigenResult SymEigenDecompose(const Matrix& input) {
  const std::size_t n = input.rows();
  if (n != input.cols()) throw DataError("eigensolver: matrix is not square");
  for (double v : input.values())
    if (!std::isfinite(v)) throw DataError("eigensolver: non-finite entry");
  const double norm = input.FrobeniusNorm();
  const double sym_tol = kSymmetryTolerance * std::max(1.0, norm);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(input(i, j) - input(j, i)) > sym_tol)
        throw DataError("eigensolver: matrix is not symmetric at (" + std::to_string(i) + ", " +
                        std::to_string(j) + ")");

  Matrix a = input;
  // Work on the exactly symmetric part.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));

  Matrix v = Matrix::Identity(n);
  const double threshold = kOffDiagonalTolerance * norm;
  int sweeps = 0;
  while (sweeps < kMaxSweeps && OffDiagonalNorm(a) > threshold) {
    ++sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Rotation angle zeroing a(p,q): t = tan(θ) as the smaller root of
        // t² + 2θ't − 1 = 0 with θ' = (aqq − app) / (2 apq).
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t r = 0; r < n; ++r) {
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double apr = a(p, r);
          const double aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  SymEigenResult result;
  result.sweeps = sweeps;
  result.values.resize(n);
  result.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    result.values[j] = a(order[j], order[j]);
    for (std::size_t r = 0; r < n; ++r) result.vectors(r, j) = v(r, order[j]);
  }
  return result;
}

std::vector<double> SymEigenvalues(const Matrix& a) { return SymEigenDecompose(a).values; }

double NuclearNormRaw(const Matrix& p) {
  for (double x : p.values())
    if (!std::isfinite(x)) throw DataError("nuclear norm: non-finite entry");
  // σ_j = ‖A v_j‖ for the Gram eigenvectors v_j; unlike √λ_j this stays
  // accurate for singular values near zero.
  const Matrix a = p.cols() <= p.rows() ? p : p.Transposed();
  const Matrix v = SymEigenDecompose(a.Gram()).vectors;
  const Matrix av = a * v;
  double sum = 0.0;
  for (std::size_t j = 0; j < av.cols(); ++j) {
    double sq = 0.0;
    for (std::size_t i = 0; i < av.rows(); ++i) sq += av(i, j) * av(i, j);
    sum += std::sqrt(sq);
  }
  return sum;
}

}  // namespace predmat::numerics
