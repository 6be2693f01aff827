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

#ifndef PREDMAT_EIGEN_H_
#define PREDMAT_EIGEN_H_

#include <vector>

#include "predmat/matrix.h"

namespace predmat::numerics {

struct SymEigenResult {
  std::vector<double> values;  // descending
  Matrix vectors;              // column j is the eigenvector of values[j]
  int sweeps = 0;
};

// Cyclic Jacobi eigensolver for symmetric matrices. Sweeps until the
// off-diagonal Frobenius norm drops below 1e-12·‖A‖_F (at most 100 sweeps).
// Throws DataError if A is not square or |a_ij − a_ji| > 1e-9·max(1, ‖A‖_F).
SymEigenResult SymEigenDecompose(const Matrix& a);
std::vector<double> SymEigenvalues(const Matrix& a);

// Sum of singular values, via the eigenvectors v_j of the smaller Gram
// matrix (PᵀP when cols <= rows, else PPᵀ): σ_j = ‖P v_j‖ (‖Pᵀ v_j‖).
double NuclearNormRaw(const Matrix& p);

}  // namespace predmat::numerics

#endif  // PREDMAT_EIGEN_H_
