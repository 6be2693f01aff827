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

#include "predmat/study.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "predmat/correlation.h"
#include "predmat/error.h"
#include "predmat/io.h"

namespace predmat::study {

using metrics::Metric;
using nlohmann::json;

std::string ToString(Transform t) { return t == Transform::kProbit ? "probit" : "raw"; }

Transform ParseTransform(const std::string& text) {
  if (text == "probit") return Transform::kProbit;
  if (text == "raw") return Transform::kRaw;
  throw ConfigError("transform must be 'probit' or 'raw', got '" + text + "'");
}

std::string ToString(GroundTruth g) {
  return g == GroundTruth::kAccuracy ? "accuracy" : "macro_f1";
}

GroundTruth ParseGroundTruth(const std::string& text) {
  if (text == "accuracy") return GroundTruth::kAccuracy;
  if (text == "macro_f1") return GroundTruth::kMacroF1;
  throw ConfigError("ground truth must be 'accuracy' or 'macro_f1', got '" + text + "'");
}

json StudyConfig::ToJson() const {
  json j;
  json names = json::array();
  for (Metric m : metrics) names.push_back(std::string(metrics::Name(m)));
  j["metrics"] = names;
  j["energy_temperature"] = options.confidence.energy_temperature;
  j["mano_eta"] = options.confidence.mano_eta;
  j["mano_p"] = options.confidence.mano_p;
  j["cot_aggregation"] = metrics::ToString(options.cot.aggregation);
  j["cot_solver"] = metrics::ToString(options.cot.solver);
  j["cot_exact_limit"] = options.cot.exact_limit;
  j["cot_entropic_epsilon"] = options.cot.entropic_epsilon;
  j["reconstruct_logits"] = options.reconstruct_logits;
  j["prior"] = prior_path ? json(*prior_path) : json(nullptr);
  j["source_hist"] = source_hist_path ? json(*source_hist_path) : json(nullptr);
  j["val_preds"] = val_predictions_path ? json(*val_predictions_path) : json(nullptr);
  j["val_labels"] = val_labels_path ? json(*val_labels_path) : json(nullptr);
  json overrides = json::object();
  for (const auto& [m, t] : transform_overrides) overrides[std::string(metrics::Name(m))] = ToString(t);
  j["transform_overrides"] = overrides;
  j["ground_truth"] = ToString(ground_truth);
  j["min_truth_range"] = min_truth_range;
  // Thread count is deliberately absent: reports must not depend on it.
  return j;
}

Transform DefaultTransform(Metric m) {
  return metrics::Info(m).probit == metrics::ProbitPolicy::kNone ? Transform::kRaw
                                                                  : Transform::kProbit;
}

double ToUnitInterval(Metric m, double value, std::size_t k) {
  switch (metrics::Info(m).probit) {
    case metrics::ProbitPolicy::kClampUnit:
      return std::clamp(value, 0.0, 1.0);
    case metrics::ProbitPolicy::kDivideByK:
      return value / static_cast<double>(k);
    default:
      return value;
  }
}

const StudyResult* StudyReport::Find(std::string_view metric_name) const {
  for (const auto& r : results)
    if (r.metric_name == metric_name) return &r;
  return nullptr;
}

void ParallelFor(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_index = count;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

namespace {

ValidationStats LoadValidation(const std::string& preds_path, const std::string& labels_path) {
  const auto preds = io::LoadPredictionCsv(preds_path);
  const auto labels = io::LoadLabelsCsv(labels_path);
  labels.CheckCompatible(preds.n(), preds.k());
  return metrics::CalibrateAtc(preds, labels);
}

}  // namespace

LoadedStudy LoadStudy(const Manifest& manifest, const StudyConfig& config) {
  manifest.Validate();
  LoadedStudy study;
  study.mode = manifest.mode;
  std::vector<std::optional<LoadedEntry>> loaded(manifest.entries.size());
  ParallelFor(manifest.entries.size(), config.threads, [&](std::size_t i) {
    const auto& e = manifest.entries[i];
    LoadedEntry entry{e.model_id, e.dataset_id, io::LoadPredictionCsv(e.predictions_path),
                      std::nullopt, std::nullopt};
    if (e.logits_path) {
      entry.logits = io::LoadLogitCsv(*e.logits_path);
      if (entry.logits->n() != entry.preds.n() || entry.logits->k() != entry.preds.k())
        throw DataError(*e.logits_path + ": logit shape does not match " + e.predictions_path);
    }
    if (e.labels_path) {
      entry.labels = io::LoadLabelsCsv(*e.labels_path);
      try {
        entry.labels->CheckCompatible(entry.preds.n(), entry.preds.k());
      } catch (const DataError& err) {
        throw DataError(*e.labels_path + ": " + err.what());
      }
    }
    loaded[i] = std::move(entry);
  });
  for (auto& e : loaded) study.entries.push_back(std::move(*e));

  std::set<std::string> models;
  for (const auto& e : manifest.entries) models.insert(e.model_id);
  if (config.val_predictions_path.has_value() != config.val_labels_path.has_value())
    throw ConfigError("validation needs both --val-preds and --val-labels");
  if (config.val_predictions_path) {
    if (models.size() != 1)
      throw ConfigError("--val-preds/--val-labels apply to single-model studies only; use the "
                        "manifest 'validation' map for model-centric studies");
    study.validation[*models.begin()] =
        LoadValidation(*config.val_predictions_path, *config.val_labels_path);
  }
  for (const auto& [model_id, source] : manifest.validation) {
    if (!models.contains(model_id) || study.validation.contains(model_id)) continue;
    study.validation[model_id] = LoadValidation(source.predictions_path, source.labels_path);
  }

  const std::size_t k = study.entries.front().preds.k();
  for (const auto& e : study.entries)
    if (e.preds.k() != k) throw DataError("manifest entries disagree on the class count");
  if (config.prior_path)
    study.prior = metrics::PriorDistribution{
        numerics::Histogram::FromWeights(io::LoadWeightsCsv(*config.prior_path)),
        metrics::PriorOrigin::kFile};
  if (config.source_hist_path)
    study.source = metrics::SourceHistogram{
        numerics::Histogram::FromWeights(io::LoadWeightsCsv(*config.source_hist_path)),
        metrics::HistogramOrigin::kUserSupplied};
  return study;
}

StudyReport RunStudy(const LoadedStudy& study, const StudyConfig& config) {
  if (study.entries.size() < 3)
    throw ConfigError("a study needs at least 3 " +
                      std::string(study.mode == StudyMode::kDatasetCentric ? "test sets"
                                                                           : "models") +
                      ", got " + std::to_string(study.entries.size()));
  {
    std::set<std::string> models, datasets;
    for (const auto& e : study.entries) {
      models.insert(e.model_id);
      datasets.insert(e.dataset_id);
    }
    if (study.mode == StudyMode::kDatasetCentric && models.size() != 1)
      throw ConfigError("dataset-centric study requires exactly one model");
    if (study.mode == StudyMode::kModelCentric && datasets.size() != 1)
      throw ConfigError("model-centric study requires exactly one test set");
  }
  for (const auto& e : study.entries)
    if (!e.labels)
      throw ConfigError("entry (" + e.model_id + ", " + e.dataset_id +
                        ") has no labels; studies need ground truth");
  config.options.confidence.Validate();

  const std::size_t k = study.entries.front().preds.k();
  if (study.prior && study.prior->d.size() != k)
    throw DataError("prior has " + std::to_string(study.prior->d.size()) + " classes, expected " +
                    std::to_string(k));
  if (study.source && study.source->mass.size() != k)
    throw DataError("source histogram has " + std::to_string(study.source->mass.size()) +
                    " classes, expected " + std::to_string(k));

  const bool have_logits = std::all_of(study.entries.begin(), study.entries.end(),
                                       [](const LoadedEntry& e) { return e.logits.has_value(); });
  const bool have_validation =
      std::all_of(study.entries.begin(), study.entries.end(),
                  [&](const LoadedEntry& e) { return study.validation.contains(e.model_id); });
  std::vector<Metric> metric_list =
      config.metrics.empty() ? metrics::DefaultMetrics(have_logits, have_validation, config.options)
                             : config.metrics;
  metrics::CheckMetricInputs(metric_list, have_logits, have_validation, config.options);
  for (const auto& [m, t] : config.transform_overrides)
    if (t == Transform::kProbit && DefaultTransform(m) == Transform::kRaw)
      throw ConfigError(std::string(metrics::Name(m)) +
                        " is not bounded in [0, 1]; probit scaling is unavailable");

  // Subjects sorted by id so the report does not depend on manifest order.
  std::vector<std::size_t> order(study.entries.size());
  std::iota(order.begin(), order.end(), 0);
  auto subject_of = [&](const LoadedEntry& e) {
    return study.mode == StudyMode::kDatasetCentric ? e.dataset_id : e.model_id;
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return subject_of(study.entries[a]) < subject_of(study.entries[b]);
  });

  std::vector<double> truth(study.entries.size());
  for (std::size_t i = 0; i < study.entries.size(); ++i) {
    const auto& e = study.entries[i];
    truth[i] = config.ground_truth == GroundTruth::kAccuracy ? Accuracy(e.preds, *e.labels)
                                                             : MacroF1(e.preds, *e.labels);
  }

  // Evaluate every (entry, metric) cell; results land in fixed slots.
  const std::size_t num_metrics = metric_list.size();
  struct Cell {
    std::optional<metrics::MetricValue> value;
    std::string error;
  };
  std::vector<Cell> cells(study.entries.size() * num_metrics);
  ParallelFor(cells.size(), config.threads, [&](std::size_t c) {
    const auto& e = study.entries[c / num_metrics];
    const Metric m = metric_list[c % num_metrics];
    metrics::MetricInputs inputs;
    inputs.preds = &e.preds;
    inputs.logits = e.logits ? &*e.logits : nullptr;
    auto val = study.validation.find(e.model_id);
    inputs.validation = val != study.validation.end() ? &val->second : nullptr;
    inputs.prior = study.prior ? &*study.prior : nullptr;
    inputs.source = study.source ? &*study.source : nullptr;
    try {
      cells[c].value = metrics::EvaluateMetric(m, inputs, config.options);
    } catch (const NumericalError& err) {
      cells[c].error = err.what();
    }
  });

  StudyReport report;
  report.mode = study.mode;
  report.ground_truth = config.ground_truth;
  if (study.prior) report.prior_origin = metrics::ToString(study.prior->origin);
  if (study.source) report.source_hist_origin = metrics::ToString(study.source->origin);
  const auto [tmin, tmax] = std::minmax_element(truth.begin(), truth.end());
  report.truth_range = *tmax - *tmin;
  report.narrow_truth_range = report.truth_range < config.min_truth_range;

  const auto truth_ordered = [&] {
    std::vector<double> t;
    for (std::size_t i : order) t.push_back(truth[i]);
    return t;
  }();
  const auto truth_probit = correlation::ProbitTransform(truth_ordered, true);

  for (std::size_t mi = 0; mi < num_metrics; ++mi) {
    const Metric m = metric_list[mi];
    const auto& info = metrics::Info(m);
    StudyResult result;
    result.metric_name = std::string(info.name);
    result.category = info.category;
    result.expected_sign = info.expected_sign;
    result.negated = info.expected_sign < 0;
    auto override_it = config.transform_overrides.find(m);
    result.transform =
        override_it != config.transform_overrides.end() ? override_it->second : DefaultTransform(m);

    std::vector<double> raw;
    std::set<std::string> solvers;
    for (std::size_t i : order) {
      const Cell& cell = cells[i * num_metrics + mi];
      if (!cell.value) {
        if (result.error.empty())
          result.error = subject_of(study.entries[i]) + ": " + cell.error;
        continue;
      }
      raw.push_back(cell.value->value);
      result.logits_reconstructed |= cell.value->logits_reconstructed;
      if (!cell.value->cot_solver.empty()) solvers.insert(cell.value->cot_solver);
    }
    result.cot_solvers.assign(solvers.begin(), solvers.end());
    if (!result.error.empty()) {
      report.results.push_back(std::move(result));
      continue;
    }

    std::vector<double> transformed;
    if (result.transform == Transform::kProbit) {
      std::vector<double> unit;
      for (double v : raw) unit.push_back(ToUnitInterval(m, v, k));
      transformed = correlation::ProbitTransform(unit, true);
    } else {
      transformed = raw;
    }
    for (std::size_t p = 0; p < order.size(); ++p) {
      const auto& e = study.entries[order[p]];
      result.points.push_back(
          {subject_of(e), raw[p], transformed[p], truth_ordered[p], truth_probit[p]});
    }

    try {
      result.pearson_r = correlation::Pearson(transformed, truth_probit);
      result.spearman_rho = correlation::Spearman(raw, truth_ordered);
      result.kendall_tau_w = correlation::KendallTauWeighted(raw, truth_ordered);
      const auto fit = correlation::LinearFitR2(transformed, truth_probit);
      result.r_squared = fit.r_squared;
      result.fit_slope = fit.slope;
      result.fit_intercept = fit.intercept;
      result.ok = true;
    } catch (const NumericalError& err) {
      result.error = err.what();
    }

    if (study.mode == StudyMode::kModelCentric) {
      RankingTable table;
      table.metric_name = result.metric_name;
      for (std::size_t p = 0; p < order.size(); ++p)
        table.ranked.emplace_back(result.points[p].subject_id, raw[p]);
      const int sign = info.expected_sign;
      std::stable_sort(table.ranked.begin(), table.ranked.end(),
                       [sign](const auto& a, const auto& b) {
                         if (a.second != b.second) return sign * a.second > sign * b.second;
                         return a.first < b.first;
                       });
      report.rankings.push_back(std::move(table));
    }
    report.results.push_back(std::move(result));
  }
  return report;
}

StudyReport RunDatasetCentric(const Manifest& manifest, const StudyConfig& config) {
  if (manifest.mode != StudyMode::kDatasetCentric)
    throw ConfigError("evaluate needs a dataset_centric manifest");
  return RunStudy(LoadStudy(manifest, config), config);
}

StudyReport RunModelCentric(const Manifest& manifest, const StudyConfig& config) {
  if (manifest.mode != StudyMode::kModelCentric)
    throw ConfigError("rank needs a model_centric manifest");
  return RunStudy(LoadStudy(manifest, config), config);
}

json ReportToJson(const StudyReport& report) {
  json j;
  j["mode"] = ToString(report.mode);
  j["ground_truth"] = ToString(report.ground_truth);
  j["truth_range"] = report.truth_range;
  j["narrow_truth_range"] = report.narrow_truth_range;
  j["prior_origin"] = report.prior_origin;
  j["source_hist_origin"] = report.source_hist_origin;
  json results = json::array();
  for (const auto& r : report.results) {
    json item;
    item["metric"] = r.metric_name;
    item["category"] = metrics::ToString(r.category);
    item["expected_sign"] = r.expected_sign;
    item["negated"] = r.negated;
    item["transform"] = ToString(r.transform);
    item["status"] = r.ok ? "ok" : "error";
    if (!r.ok) item["error"] = r.error;
    if (r.ok) {
      item["pearson_r"] = r.pearson_r;
      item["spearman_rho"] = r.spearman_rho;
      item["kendall_tau_w"] = r.kendall_tau_w;
      item["r_squared"] = r.r_squared;
      item["fit_slope"] = r.fit_slope;
      item["fit_intercept"] = r.fit_intercept;
      const double s = r.expected_sign;
      item["display"] = {{"pearson_r", s * r.pearson_r},
                         {"spearman_rho", s * r.spearman_rho},
                         {"kendall_tau_w", s * r.kendall_tau_w}};
    }
    item["logits_reconstructed"] = r.logits_reconstructed;
    if (!r.cot_solvers.empty()) item["cot_solver"] = r.cot_solvers;
    json points = {{"subject_id", json::array()},       {"metric_raw", json::array()},
                   {"metric_transformed", json::array()}, {"truth_raw", json::array()},
                   {"truth_transformed", json::array()}};
    for (const auto& p : r.points) {
      points["subject_id"].push_back(p.subject_id);
      points["metric_raw"].push_back(p.metric_value);
      points["metric_transformed"].push_back(p.metric_transformed);
      points["truth_raw"].push_back(p.ground_truth);
      points["truth_transformed"].push_back(p.truth_transformed);
    }
    item["points"] = std::move(points);
    results.push_back(std::move(item));
  }
  j["results"] = std::move(results);
  if (report.mode == StudyMode::kModelCentric) {
    json rankings = json::array();
    for (const auto& t : report.rankings) {
      json ranked = json::array();
      for (const auto& [id, score] : t.ranked) ranked.push_back({{"model_id", id}, {"score", score}});
      rankings.push_back({{"metric", t.metric_name}, {"ranking", std::move(ranked)}});
    }
    j["rankings"] = std::move(rankings);
  }
  return j;
}

std::string RenderReport(const StudyReport& report, const std::string& command,
                         const json& effective_config) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["tool"] = kToolName;
  doc["tool_version"] = kToolVersion;
  doc["command"] = command;
  doc["config"] = effective_config;
  doc["study"] = ReportToJson(report);
  return doc.dump(2) + "\n";
}

std::string ScatterCsv(const StudyReport& report) {
  std::ostringstream out;
  out << "metric,subject_id,metric_raw,metric_transformed,truth_raw,truth_transformed\n";
  for (const auto& r : report.results)
    for (const auto& p : r.points)
      out << r.metric_name << ',' << p.subject_id << ',' << io::FormatDouble(p.metric_value) << ','
          << io::FormatDouble(p.metric_transformed) << ',' << io::FormatDouble(p.ground_truth)
          << ',' << io::FormatDouble(p.truth_transformed) << '\n';
  return out.str();
}

}  // namespace predmat::study
