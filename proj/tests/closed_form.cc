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

#include "closed_form.h"

#include <cmath>

#include "predmat/metrics_confidence.h"

namespace closed_form {

using predmat::metrics::Metric;

namespace {

oracle::Rows OneHotLogits(const oracle::Rows& preds) {
  oracle::Rows z = preds;
  for (auto& row : z)
    for (double& v : row) v = v == 1.0 ? kOneHotLogit : 0.0;
  return z;
}

// Energy and MaNo of rows L·e_c. τ ≈ ln k stays below the default η = 5 for
// k ≤ 10, so MaNo uses the Taylor weights 1 + z + z²/2.
double OneHotEnergy(double k) { return -(kOneHotLogit + std::log1p((k - 1) * std::exp(-kOneHotLogit))); }
double OneHotMano(double k) {
  const double a = 1.0 + kOneHotLogit + kOneHotLogit * kOneHotLogit / 2.0;
  const double top = a / (a + k - 1), rest = 1.0 / (a + k - 1);
  return std::pow((std::pow(top, 4) + (k - 1) * std::pow(rest, 4)) / k, 0.25);
}

}  // namespace

std::vector<Case> Cases() {
  std::vector<Case> cases;
  // Validation split: balanced one-hot and always correct, so accuracy and
  // confidence are 1 and the ATC threshold sits just below 1.
  for (std::size_t k : {2u, 4u, 10u}) {
    const double kd = static_cast<double>(k);
    oracle::Rows val(2 * k, std::vector<double>(k, 0.0));
    std::vector<int> val_labels;
    for (std::size_t i = 0; i < 2 * k; ++i) {
      val[i][i % k] = 1.0;
      val_labels.push_back(static_cast<int>(i % k));
    }
    const auto stats = predmat::metrics::CalibrateAtc(
        predmat::PredictionMatrix(predmat::Matrix::FromRows(val)), predmat::LabelVector(val_labels));
    for (std::size_t n : {k, 4 * k}) {
      const std::string suffix = " k=" + std::to_string(k) + " n=" + std::to_string(n);
      Case uniform{"uniform" + suffix,
                   oracle::Rows(n, std::vector<double>(k, 1.0 / kd)),
                   oracle::Rows(n, std::vector<double>(k, 0.0)),
                   stats,
                   {
                       {Metric::kConfScore, 1.0 / kd},
                       {Metric::kEntropy, -std::log(kd)},
                       {Metric::kAtc, 0.0},
                       {Metric::kAvgEnergy, -std::log(kd)},
                       {Metric::kDoc, 1.0 / kd},
                       {Metric::kMano, 1.0 / kd},
                       {Metric::kClassEntropy, std::log(kd)},
                       // Ties send every top-1 to class 0.
                       {Metric::kCtd, (kd - 1.0) / 2.0},
                       {Metric::kNuclearNorm, 1.0 / kd},
                       {Metric::kCot, 1.0 - 1.0 / kd},
                       {Metric::kSoftmaxCorr, 1.0 / std::sqrt(kd)},
                       {Metric::kIm, 0.0},
                   }};
      cases.push_back(uniform);

      oracle::Rows balanced(n, std::vector<double>(k, 0.0));
      for (std::size_t i = 0; i < n; ++i) balanced[i][i % k] = 1.0;
      cases.push_back({"balanced_one_hot" + suffix,
                       balanced,
                       OneHotLogits(balanced),
                       stats,
                       {
                           {Metric::kConfScore, 1.0},
                           {Metric::kEntropy, 0.0},
                           {Metric::kAtc, 1.0},
                           {Metric::kAvgEnergy, OneHotEnergy(kd)},
                           {Metric::kDoc, 1.0},
                           {Metric::kMano, OneHotMano(kd)},
                           {Metric::kClassEntropy, std::log(kd)},
                           {Metric::kCtd, 0.0},
                           {Metric::kNuclearNorm, 1.0},
                           {Metric::kCot, 0.0},
                           {Metric::kSoftmaxCorr, 1.0},
                           {Metric::kIm, std::log(kd)},
                       }});

      oracle::Rows single(n, std::vector<double>(k, 0.0));
      for (auto& row : single) row[0] = 1.0;
      cases.push_back({"single_class_one_hot" + suffix,
                       single,
                       OneHotLogits(single),
                       stats,
                       {
                           {Metric::kConfScore, 1.0},
                           {Metric::kEntropy, 0.0},
                           {Metric::kAtc, 1.0},
                           {Metric::kAvgEnergy, OneHotEnergy(kd)},
                           {Metric::kDoc, 1.0},
                           {Metric::kMano, OneHotMano(kd)},
                           {Metric::kClassEntropy, 0.0},
                           {Metric::kCtd, (kd - 1.0) / 2.0},
                           {Metric::kNuclearNorm, 1.0 / std::sqrt(kd)},
                           // References are balanced; only the class-0 share
                           // matches at zero cost, the rest pay 1.
                           {Metric::kCot, 1.0 - 1.0 / kd},
                           {Metric::kSoftmaxCorr, 1.0 / std::sqrt(kd)},
                           {Metric::kIm, 0.0},
                       }});
    }
  }
  return cases;
}

double MaxDeviation(const Case& c, std::string* detail) {
  const predmat::PredictionMatrix preds(predmat::Matrix::FromRows(c.preds));
  const predmat::LogitMatrix logits(predmat::Matrix::FromRows(c.logits));
  const auto prior = predmat::metrics::PriorDistribution::Uniform(preds.k());
  const auto source = predmat::metrics::SourceHistogram::Uniform(preds.k());
  predmat::metrics::MetricInputs inputs;
  inputs.preds = &preds;
  inputs.logits = &logits;
  inputs.validation = &c.validation;
  inputs.prior = &prior;
  inputs.source = &source;
  const predmat::metrics::MetricOptions options;
  double worst = 0.0;
  if (detail) detail->clear();
  for (const auto& info : predmat::metrics::AllMetrics()) {
    const double value = predmat::metrics::EvaluateMetric(info.id, inputs, options).value;
    double dev = std::fabs(value - c.expected.at(info.id));
    if (std::isnan(dev)) dev = INFINITY;
    if (dev > worst) {
      worst = dev;
      if (detail)
        *detail = std::string(info.name) + " = " + std::to_string(value) + ", expected " +
                  std::to_string(c.expected.at(info.id));
    }
  }
  return worst;
}

}  // namespace closed_form
