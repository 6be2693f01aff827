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

#include "predmat/metrics_confidence.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "predmat/error.h"

namespace predmat::metrics {

void ConfidenceConfig::Validate() const {
  if (!(energy_temperature > 0.0) || !std::isfinite(energy_temperature))
    throw ConfigError("energy_temperature must be a positive finite number");
  if (!(mano_eta > 0.0) || !std::isfinite(mano_eta))
    throw ConfigError("mano_eta must be a positive finite number");
  if (mano_p < 1) throw ConfigError("mano_p must be a positive integer");
}

double ShannonEntropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

double ConfScore(const PredictionMatrix& preds) {
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.n(); ++i) {
    auto r = preds.row(i);
    sum += *std::max_element(r.begin(), r.end());
  }
  return sum / static_cast<double>(preds.n());
}

double MeanEntropy(const PredictionMatrix& preds) {
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.n(); ++i) sum += ShannonEntropy(preds.row(i));
  return sum / static_cast<double>(preds.n());
}

double NegEntropy(const PredictionMatrix& preds) { return -MeanEntropy(preds); }

namespace {

std::vector<double> MaxConfidences(const PredictionMatrix& preds) {
  std::vector<double> c(preds.n());
  for (std::size_t i = 0; i < preds.n(); ++i) {
    auto r = preds.row(i);
    c[i] = *std::max_element(r.begin(), r.end());
  }
  return c;
}

double LogSumExpScaled(std::span<const double> z, double temperature) {
  const double max = *std::max_element(z.begin(), z.end()) / temperature;
  double s = 0.0;
  for (double v : z) s += std::exp(v / temperature - max);
  return max + std::log(s);
}

}  // namespace

ValidationStats CalibrateAtc(const PredictionMatrix& val_preds, const LabelVector& val_labels) {
  if (val_labels.size() == 0) throw DataError("ATC calibration: empty validation set");
  ValidationStats stats;
  stats.val_accuracy = Accuracy(val_preds, val_labels);
  stats.val_conf_score = ConfScore(val_preds);

  std::vector<double> conf = MaxConfidences(val_preds);
  std::sort(conf.begin(), conf.end(), std::greater<>());
  const std::size_t n = conf.size();
  const auto m = static_cast<std::size_t>(std::lround(stats.val_accuracy * static_cast<double>(n)));
  stats.atc_threshold = m < n ? conf[m] : conf[n - 1] - 1e-12;
  return stats;
}

double AtcScore(const PredictionMatrix& preds, const ValidationStats& stats) {
  std::size_t above = 0;
  for (double c : MaxConfidences(preds))
    if (c > stats.atc_threshold) ++above;
  return static_cast<double>(above) / static_cast<double>(preds.n());
}

double AvgEnergy(const LogitMatrix& logits, const ConfidenceConfig& cfg) {
  cfg.Validate();
  const double t = cfg.energy_temperature;
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.n(); ++i) sum += t * LogSumExpScaled(logits.row(i), t);
  return -sum / static_cast<double>(logits.n());
}

double DocScore(const PredictionMatrix& test_preds, const ValidationStats& stats) {
  return stats.val_accuracy - (stats.val_conf_score - ConfScore(test_preds));
}

double ManoTau(const LogitMatrix& logits) {
  const double k = static_cast<double>(logits.k());
  std::vector<double> p;
  double entropy = 0.0;
  for (std::size_t i = 0; i < logits.n(); ++i) {
    auto z = logits.row(i);
    p.assign(z.begin(), z.end());
    SoftmaxInPlace(p);
    entropy += ShannonEntropy(p);
  }
  return std::log(k) - entropy / static_cast<double>(logits.n());
}

double ManoScore(const LogitMatrix& logits, const ConfidenceConfig& cfg) {
  cfg.Validate();
  const bool taylor = ManoTau(logits) <= cfg.mano_eta;
  const double p = static_cast<double>(cfg.mano_p);
  std::vector<double> q;
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.n(); ++i) {
    auto z = logits.row(i);
    q.assign(z.begin(), z.end());
    if (taylor) {
      double total = 0.0;
      for (double& v : q) {
        v = 1.0 + v + 0.5 * v * v;
        total += v;
      }
      for (double& v : q) v /= total;
    } else {
      SoftmaxInPlace(q);
    }
    for (double v : q) sum += std::pow(std::abs(v), p);
  }
  const double cells = static_cast<double>(logits.n() * logits.k());
  return std::pow(sum / cells, 1.0 / p);
}

}  // namespace predmat::metrics
