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

#ifndef PREDMAT_NORMAL_H_
#define PREDMAT_NORMAL_H_

namespace predmat::numerics {

// Standard normal CDF Φ.
double NormalCdf(double x);

// Φ⁻¹(p) for p in (0, 1): rational approximation refined by one Newton step
// against NormalCdf. Absolute error below 1e-8 across the open interval.
// DataError outside (0, 1).
double InvNormCdf(double p);

}  // namespace predmat::numerics

#endif  // PREDMAT_NORMAL_H_
