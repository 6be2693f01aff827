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

#ifndef PREDMAT_METRICS_CONFIDENCE_H_
#define PREDMAT_METRICS_CONFIDENCE_H_

#include <span>

#include "predmat/core.h"

namespace predmat::metrics {

struct ConfidenceConfig {
  double energy_temperature = 1.0;
  double mano_eta = 5.0;
  int mano_p = 4;

  // ConfigError unless temperature > 0, eta > 0, p >= 1.
  void Validate() const;
};

// Shannon entropy in nats, 0·ln 0 := 0.
double ShannonEntropy(std::span<const double> p);

// Mean of row maxima, in [1/k, 1].
double ConfScore(const PredictionMatrix& preds);

// Mean per-row entropy, in [0, ln k].
double MeanEntropy(const PredictionMatrix& preds);
// −MeanEntropy, so that higher means more confident.
double NegEntropy(const PredictionMatrix& preds);

// Threshold t set from sorted validation max-confidences c_(1) >= ... >=
// c_(n): with m = round(acc·n), t = c_(m+1) when m < n, else c_(n) − 1e-12.
// DataError on an empty or mismatched validation set.
ValidationStats CalibrateAtc(const PredictionMatrix& val_preds, const LabelVector& val_labels);

// Fraction of rows whose max probability is strictly above the threshold.
double AtcScore(const PredictionMatrix& preds, const ValidationStats& stats);

// −(1/n) Σ_i T·logsumexp(z_i / T), evaluated with max subtraction.
double AvgEnergy(const LogitMatrix& logits, const ConfidenceConfig& cfg);

// val_accuracy − (val_conf_score − ConfScore(test)).
double DocScore(const PredictionMatrix& test_preds, const ValidationStats& stats);

// Mean KL(softmax(z_i) ‖ uniform) = ln k − mean entropy; selects the MaNo
// normalization branch.
double ManoTau(const LogitMatrix& logits);

// MaNo: rows normalized through v(z) = 1 + z + z²/2 when tau <= eta (the
// Taylor weight is >= 1/2 everywhere) or softmax otherwise, then the
// entrywise L_p mean ((1/(nk)) Σ |Q_ij|^p)^(1/p).
double ManoScore(const LogitMatrix& logits, const ConfidenceConfig& cfg);

}  // namespace predmat::metrics

#endif  // PREDMAT_METRICS_CONFIDENCE_H_
