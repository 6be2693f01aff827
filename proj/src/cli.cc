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

#include "predmat/cli.h"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "predmat/error.h"
#include "predmat/io.h"
#include "predmat/metrics.h"
#include "predmat/study.h"
#include "predmat/synthbench.h"

namespace predmat::cli {

namespace {

using nlohmann::json;

std::string EnvName(std::string key) {
  for (char& c : key) c = c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return kEnvPrefix + key;
}

std::string ScalarText(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

// Reads TOML or JSON (detected by a leading '{'). Keys may use '_' or '-'.
// Arrays become comma-joined values. Keys whose environment variable is set
// are dropped so the environment takes precedence over the file.
class ConfigFile : public CLI::ConfigTOML {
 public:
  // Items are routed to this subcommand.
  explicit ConfigFile(std::string subcommand) : subcommand_(std::move(subcommand)) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::string text((std::istreambuf_iterator<char>(input)), std::istreambuf_iterator<char>());
    const auto first = text.find_first_not_of(" \t\r\n");
    std::vector<CLI::ConfigItem> items;
    if (first != std::string::npos && text[first] == '{') {
      json doc;
      try {
        doc = json::parse(text);
      } catch (const json::parse_error& e) {
        throw CLI::ConversionError("config file is not valid JSON: " + std::string(e.what()));
      }
      for (const auto& [key, value] : doc.items()) {
        CLI::ConfigItem item;
        item.name = key;
        if (value.is_array()) {
          std::string joined;
          for (const auto& v : value) joined += (joined.empty() ? "" : ",") + ScalarText(v);
          item.inputs.push_back(joined);
        } else if (value.is_object()) {
          throw CLI::ConversionError("config key '" + key + "' must not be a table");
        } else {
          item.inputs.push_back(ScalarText(value));
        }
        items.push_back(std::move(item));
      }
    } else {
      std::istringstream again(text);
      items = CLI::ConfigTOML::from_config(again);
      for (auto& item : items)
        if (item.inputs.size() > 1) {
          std::string joined;
          for (const auto& v : item.inputs) joined += (joined.empty() ? "" : ",") + v;
          item.inputs = {joined};
        }
    }
    std::vector<CLI::ConfigItem> kept;
    for (auto& item : items) {
      std::replace(item.name.begin(), item.name.end(), '_', '-');
      if (item.name == "++" || item.name == "--") {
        kept.push_back(std::move(item));
        continue;
      }
      if (std::getenv(EnvName(item.name).c_str()) != nullptr) continue;
      if (!subcommand_.empty()) item.parents.insert(item.parents.begin(), subcommand_);
      kept.push_back(std::move(item));
    }
    return kept;
  }

 private:
  std::string subcommand_;
};

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// Options shared by metrics, evaluate and rank.
struct MetricFlags {
  std::string metrics;
  std::string val_preds;
  std::string val_labels;
  std::string prior;
  std::string source_hist;
  double energy_temperature = 1.0;
  double mano_eta = 5.0;
  int mano_p = 4;
  std::string cot_aggregation = "mean";
  std::string cot_solver = "auto";
  std::size_t cot_exact_limit = 2000;
  double cot_epsilon = 1e-2;
  bool reconstruct_logits = false;
  std::string out;
};

void AddMetricFlags(CLI::App* app, MetricFlags& f) {
  app->add_option("--metrics", f.metrics,
                  "Comma-separated metric names or 'all' (default: every metric the inputs "
                  "support)");
  app->add_option("--val-preds", f.val_preds, "Validation predictions CSV (for atc, doc)");
  app->add_option("--val-labels", f.val_labels, "Validation labels CSV (for atc, doc)");
  app->add_option("--prior", f.prior, "Class prior weights CSV (for cot, softmax_corr)");
  app->add_option("--source-hist", f.source_hist, "Source class histogram CSV (for ctd)");
  app->add_option("--energy-temperature", f.energy_temperature, "Energy temperature T")
      ->capture_default_str();
  app->add_option("--mano-eta", f.mano_eta, "MaNo branch threshold")->capture_default_str();
  app->add_option("--mano-p", f.mano_p, "MaNo norm order")->capture_default_str();
  app->add_option("--cot-aggregation", f.cot_aggregation, "COT aggregation: mean or max")
      ->capture_default_str();
  app->add_option("--cot-solver", f.cot_solver, "COT solver: auto, exact or entropic")
      ->capture_default_str();
  app->add_option("--cot-exact-limit", f.cot_exact_limit,
                  "Largest n solved exactly when the COT solver is auto")
      ->capture_default_str();
  app->add_option("--cot-epsilon", f.cot_epsilon, "Entropic COT regularization")
      ->capture_default_str();
  app->add_flag("--reconstruct-logits", f.reconstruct_logits,
                "Derive logits as ln(p + 1e-12) when none are supplied");
  app->add_option("--out", f.out, "Write the report here instead of stdout");
}

std::optional<std::string> NonEmpty(const std::string& s) {
  return s.empty() ? std::nullopt : std::optional<std::string>(s);
}

study::StudyConfig BuildConfig(const MetricFlags& f) {
  study::StudyConfig cfg;
  if (!f.metrics.empty()) cfg.metrics = metrics::ParseMetricList(f.metrics);
  cfg.options.confidence.energy_temperature = f.energy_temperature;
  cfg.options.confidence.mano_eta = f.mano_eta;
  cfg.options.confidence.mano_p = f.mano_p;
  cfg.options.confidence.Validate();
  cfg.options.cot.aggregation = metrics::ParseCotAggregation(f.cot_aggregation);
  cfg.options.cot.solver = metrics::ParseCotSolver(f.cot_solver);
  cfg.options.cot.exact_limit = f.cot_exact_limit;
  if (!(f.cot_epsilon > 0.0)) throw ConfigError("--cot-epsilon must be positive");
  cfg.options.cot.entropic_epsilon = f.cot_epsilon;
  cfg.options.reconstruct_logits = f.reconstruct_logits;
  cfg.prior_path = NonEmpty(f.prior);
  cfg.source_hist_path = NonEmpty(f.source_hist);
  cfg.val_predictions_path = NonEmpty(f.val_preds);
  cfg.val_labels_path = NonEmpty(f.val_labels);
  if (cfg.val_predictions_path.has_value() != cfg.val_labels_path.has_value())
    throw ConfigError("--val-preds and --val-labels must be given together");
  return cfg;
}

void Emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    io::WriteTextFile(path, text);
  }
}

std::string MetricsReport(const std::string& preds_path, const std::string& logits_path,
                          const study::StudyConfig& cfg) {
  const PredictionMatrix preds = io::LoadPredictionCsv(preds_path);
  std::optional<LogitMatrix> logits;
  if (!logits_path.empty()) {
    logits = io::LoadLogitCsv(logits_path);
    if (logits->n() != preds.n() || logits->k() != preds.k())
      throw DataError(logits_path + ": logit shape does not match " + preds_path);
  }
  std::optional<ValidationStats> validation;
  if (cfg.val_predictions_path) {
    const auto vp = io::LoadPredictionCsv(*cfg.val_predictions_path);
    const auto vl = io::LoadLabelsCsv(*cfg.val_labels_path);
    vl.CheckCompatible(vp.n(), vp.k());
    if (vp.k() != preds.k()) throw DataError("validation predictions disagree on the class count");
    validation = metrics::CalibrateAtc(vp, vl);
  }
  std::optional<metrics::PriorDistribution> prior;
  if (cfg.prior_path) {
    prior = metrics::PriorDistribution{
        numerics::Histogram::FromWeights(io::LoadWeightsCsv(*cfg.prior_path)),
        metrics::PriorOrigin::kFile};
    if (prior->d.size() != preds.k()) throw DataError("prior length does not match k");
  }
  std::optional<metrics::SourceHistogram> source;
  if (cfg.source_hist_path) {
    source = metrics::SourceHistogram{
        numerics::Histogram::FromWeights(io::LoadWeightsCsv(*cfg.source_hist_path)),
        metrics::HistogramOrigin::kUserSupplied};
    if (source->mass.size() != preds.k())
      throw DataError("source histogram length does not match k");
  }

  const auto list = cfg.metrics.empty()
                        ? metrics::DefaultMetrics(logits.has_value(), validation.has_value(),
                                                  cfg.options)
                        : cfg.metrics;
  metrics::CheckMetricInputs(list, logits.has_value(), validation.has_value(), cfg.options);

  metrics::MetricInputs inputs;
  inputs.preds = &preds;
  inputs.logits = logits ? &*logits : nullptr;
  inputs.validation = validation ? &*validation : nullptr;
  inputs.prior = prior ? &*prior : nullptr;
  inputs.source = source ? &*source : nullptr;

  json values = json::object();
  json provenance;
  bool reconstructed = false;
  for (metrics::Metric m : list) {
    const auto v = metrics::EvaluateMetric(m, inputs, cfg.options);
    values[std::string(metrics::Name(m))] = v.value;
    reconstructed |= v.logits_reconstructed;
    if (!v.cot_solver.empty()) provenance["cot_solver"] = v.cot_solver;
  }
  provenance["prior_origin"] = metrics::ToString(prior ? prior->origin : metrics::PriorOrigin::kUniform);
  provenance["source_hist_origin"] =
      metrics::ToString(source ? source->origin : metrics::HistogramOrigin::kUniform);
  provenance["logits_reconstructed"] = reconstructed;
  if (validation) provenance["atc_threshold"] = validation->atc_threshold;

  json config = cfg.ToJson();
  config["preds"] = preds_path;
  config["logits"] = logits_path.empty() ? json(nullptr) : json(logits_path);
  json doc;
  doc["schema_version"] = study::kSchemaVersion;
  doc["tool"] = study::kToolName;
  doc["tool_version"] = study::kToolVersion;
  doc["command"] = "metrics";
  doc["config"] = config;
  doc["n"] = preds.n();
  doc["k"] = preds.k();
  doc["metrics"] = values;
  doc["provenance"] = provenance;
  return doc.dump(2) + "\n";
}

std::map<metrics::Metric, study::Transform> ParseTransforms(const std::string& text) {
  std::map<metrics::Metric, study::Transform> out;
  for (const auto& item : SplitList(text)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--transform expects metric=probit|raw, got '" + item + "'");
    out[metrics::ParseMetric(item.substr(0, eq))] = study::ParseTransform(item.substr(eq + 1));
  }
  return out;
}

std::vector<int> ParseSeverities(const std::string& text) {
  std::vector<int> out;
  auto parse_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("bad severity '" + s + "'");
    }
  };
  for (const auto& item : SplitList(text)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_int(item));
      continue;
    }
    const int lo = parse_int(item.substr(0, dots)), hi = parse_int(item.substr(dots + 2));
    if (lo > hi) throw ConfigError("empty severity range '" + item + "'");
    for (int s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw ConfigError("no severities given");
  for (int s : out) synth::ShiftSpec{synth::ShiftKind::kGaussianNoise, s}.Validate();
  return out;
}

// Gives every long option without one an environment variable.
void AttachEnvNames(CLI::App* app) {
  for (CLI::Option* opt : app->get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || names.front() == "help" || names.front() == "config") continue;
    if (opt->get_envname().empty()) opt->envname(EnvName(names.front()));
  }
}


}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Label-free accuracy estimation and model ranking from prediction matrices",
               "predmat"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(study::kToolVersion));

  // metrics
  MetricFlags metric_flags;
  std::string preds_path, logits_path;
  CLI::App* metrics_cmd = app.add_subcommand("metrics", "Score one prediction matrix");
  metrics_cmd->add_option("--preds", preds_path, "Prediction matrix CSV (n rows, k columns)")
      ->required();
  metrics_cmd->add_option("--logits", logits_path, "Logit matrix CSV matching --preds");
  AddMetricFlags(metrics_cmd, metric_flags);

  // evaluate / rank
  struct StudyFlags {
    MetricFlags metric;
    std::string manifest;
    std::string ground_truth = "accuracy";
    std::string transform;
    std::string scatter_csv;
    int threads = 1;
    double min_truth_range = 0.10;
  };
  StudyFlags study_flags;
  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "Dataset-centric study: one model across test sets");
  CLI::App* rank_cmd =
      app.add_subcommand("rank", "Model-centric study: many models on one test set");
  for (CLI::App* cmd : {evaluate_cmd, rank_cmd}) {
    cmd->add_option("--manifest", study_flags.manifest, "Study manifest JSON")->required();
    AddMetricFlags(cmd, study_flags.metric);
    cmd->add_option("--ground-truth", study_flags.ground_truth, "accuracy or macro_f1")
        ->capture_default_str();
    cmd->add_option("--transform", study_flags.transform,
                    "Per-metric axis scaling overrides, e.g. mano=raw,cot=probit");
    cmd->add_option("--scatter-csv", study_flags.scatter_csv, "Write scatter points as CSV");
    cmd->add_option("--threads", study_flags.threads, "Worker threads")->capture_default_str();
    cmd->add_option("--min-truth-range", study_flags.min_truth_range,
                    "Flag studies whose ground truth spans less than this")
        ->capture_default_str();
  }

  // synth
  struct SynthFlags {
    std::size_t k = 10;
    std::size_t dim = 16;
    double sep = 4.0;
    std::uint64_t seed = 1;
    std::size_t models = 0;
    std::string shift_kinds;
    std::string severities;
    double imbalance = 0.0;
    std::string mode = "dataset";
    std::string out;
    std::size_t epochs = 200;
    std::size_t n_train = 2000;
    std::size_t n_val = 2000;
    std::size_t n_test = 2000;
    int threads = 1;
  };
  SynthFlags sf;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic study suite");
  synth_cmd->add_option("--k", sf.k, "Classes")->capture_default_str();
  synth_cmd->add_option("--dim", sf.dim, "Feature dimension")->capture_default_str();
  synth_cmd->add_option("--sep", sf.sep, "Class separation")->capture_default_str();
  synth_cmd->add_option("--seed", sf.seed, "Suite seed")->capture_default_str();
  synth_cmd->add_option("--models", sf.models,
                        "Models (default 1 for dataset mode, 20 for model mode)");
  synth_cmd->add_option("--shift-kinds", sf.shift_kinds,
                        "Comma-separated shift kinds (default: all five for dataset mode, "
                        "mean_shift for model mode)");
  synth_cmd->add_option("--severities", sf.severities,
                        "Severities as a list or range such as 1..5 (default 1..5 for dataset "
                        "mode, 4 for model mode)");
  synth_cmd->add_option("--imbalance", sf.imbalance,
                        "Long-tail ratio m in (0, 1] applied to every test set");
  synth_cmd->add_option("--mode", sf.mode, "dataset or model")
      ->check(CLI::IsMember({"dataset", "model", "dataset_centric", "model_centric"}))
      ->capture_default_str();
  synth_cmd->add_option("--out", sf.out, "Output directory")->required();
  synth_cmd->add_option("--epochs", sf.epochs, "Training epochs for dataset-mode models")
      ->capture_default_str();
  synth_cmd->add_option("--n-train", sf.n_train, "Training samples")->capture_default_str();
  synth_cmd->add_option("--n-val", sf.n_val, "Validation samples")->capture_default_str();
  synth_cmd->add_option("--n-test", sf.n_test, "Test samples before shifts")
      ->capture_default_str();
  synth_cmd->add_option("--threads", sf.threads, "Worker threads")->capture_default_str();

  // The config file belongs to the top level; its keys are routed to the
  // subcommand named on the command line.
  std::string chosen;
  for (const auto& a : args)
    if (app.get_subcommand_no_throw(a) != nullptr) {
      chosen = a;
      break;
    }
  app.set_config("--config", "",
                 "TOML or JSON file of option values (keys are long option names; explicit "
                 "flags and environment win)");
  app.config_formatter(std::make_shared<ConfigFile>(chosen));
  app.allow_config_extras(CLI::config_extras_mode::error);
  for (CLI::App* cmd : {metrics_cmd, evaluate_cmd, rank_cmd, synth_cmd}) {
    cmd->fallthrough();
    AttachEnvNames(cmd);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? 0 : static_cast<int>(ErrorKind::kConfig);
  }

  try {
    if (metrics_cmd->parsed()) {
      const auto cfg = BuildConfig(metric_flags);
      Emit(MetricsReport(preds_path, logits_path, cfg), metric_flags.out, out);
      return 0;
    }
    if (evaluate_cmd->parsed() || rank_cmd->parsed()) {
      const bool evaluate = evaluate_cmd->parsed();
      auto cfg = BuildConfig(study_flags.metric);
      cfg.transform_overrides = ParseTransforms(study_flags.transform);
      cfg.ground_truth = study::ParseGroundTruth(study_flags.ground_truth);
      if (study_flags.threads < 1) throw ConfigError("--threads must be at least 1");
      cfg.threads = study_flags.threads;
      cfg.min_truth_range = study_flags.min_truth_range;
      const Manifest manifest = io::LoadManifest(study_flags.manifest);
      const auto report = evaluate ? study::RunDatasetCentric(manifest, cfg)
                                   : study::RunModelCentric(manifest, cfg);
      json effective = cfg.ToJson();
      effective["manifest"] = study_flags.manifest;
      Emit(study::RenderReport(report, evaluate ? "evaluate" : "rank", effective),
           study_flags.metric.out, out);
      if (!study_flags.scatter_csv.empty())
        io::WriteTextFile(study_flags.scatter_csv, study::ScatterCsv(report));
      if (report.narrow_truth_range)
        err << "warning: ground truth spans only " << io::FormatDouble(report.truth_range)
            << "; correlations may be unstable\n";
      return 0;
    }
    if (synth_cmd->parsed()) {
      synth::SuiteSpec spec;
      spec.task.k = sf.k;
      spec.task.dim = sf.dim;
      spec.task.class_separation = sf.sep;
      spec.task.seed = sf.seed;
      spec.task.n_train = sf.n_train;
      spec.task.n_validation = sf.n_val;
      spec.task.n_test = sf.n_test;
      spec.mode = ParseStudyMode(sf.mode);
      const bool dataset = spec.mode == StudyMode::kDatasetCentric;
      spec.models = sf.models != 0 ? sf.models : (dataset ? 1 : 20);
      std::vector<synth::ShiftKind> kinds;
      if (sf.shift_kinds.empty()) {
        kinds = dataset ? synth::AllShiftKinds()
                        : std::vector<synth::ShiftKind>{synth::ShiftKind::kMeanShift};
      } else {
        for (const auto& name : SplitList(sf.shift_kinds)) kinds.push_back(synth::ParseShiftKind(name));
      }
      const auto severities =
          ParseSeverities(sf.severities.empty() ? (dataset ? "1..5" : "4") : sf.severities);
      for (auto kind : kinds)
        for (int s : severities) spec.shifts.push_back({kind, s});
      if (synth_cmd->get_option("--imbalance")->count() > 0)
        spec.imbalance = synth::ImbalanceSpec{sf.imbalance, 0};
      spec.epochs = sf.epochs;
      if (sf.threads < 1) throw ConfigError("--threads must be at least 1");
      spec.threads = sf.threads;
      const auto suite = synth::BuildSuite(spec);
      const Manifest manifest = synth::EmitSuite(suite, sf.out);

      json summary;
      summary["schema_version"] = study::kSchemaVersion;
      summary["tool"] = study::kToolName;
      summary["tool_version"] = study::kToolVersion;
      summary["command"] = "synth";
      summary["config"] = {{"k", sf.k},
                           {"dim", sf.dim},
                           {"sep", sf.sep},
                           {"seed", sf.seed},
                           {"models", spec.models},
                           {"mode", ToString(spec.mode)},
                           {"epochs", sf.epochs},
                           {"n_train", sf.n_train},
                           {"n_val", sf.n_val},
                           {"n_test", sf.n_test},
                           {"imbalance", spec.imbalance ? json(spec.imbalance->ratio_m)
                                                        : json(nullptr)}};
      json shifts = json::array();
      for (const auto& s : spec.shifts) shifts.push_back(s.Id());
      summary["config"]["shifts"] = shifts;
      summary["manifest"] = (std::filesystem::path(sf.out) / "manifest.json").string();
      json entries = json::array();
      for (const auto& e : suite.entries)
        entries.push_back({{"model_id", e.model_id},
                           {"dataset_id", e.dataset_id},
                           {"n", e.preds.n()},
                           {"accuracy", Accuracy(e.preds, e.labels)}});
      summary["entries"] = entries;
      out << summary.dump(2) << "\n";
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::kData);
  }
  return static_cast<int>(ErrorKind::kConfig);
}

}  // namespace predmat::cli
