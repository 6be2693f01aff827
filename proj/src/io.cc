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

#include "predmat/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"
#include "predmat/error.h"

namespace predmat::io {

namespace {

using nlohmann::json;

struct ParsedCsv {
  Matrix matrix;
  std::vector<std::size_t> line_of_row;  // 1-based source lines
};

std::string Where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double ParseDouble(std::string_view field, const std::string& source, std::size_t line) {
  field = Trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
    throw DataError(Where(source, line) + "malformed number '" + std::string(field) + "'");
  return value;
}

ParsedCsv ParseCsv(std::istream& in, const std::string& source) {
  ParsedCsv out;
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = Trim(line);
    if (line_no == 1 && view.size() >= 3 && static_cast<unsigned char>(view[0]) == 0xEF &&
        static_cast<unsigned char>(view[1]) == 0xBB && static_cast<unsigned char>(view[2]) == 0xBF)
      view.remove_prefix(3);
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (!out.line_of_row.empty())
        throw DataError(Where(source, line_no) + "header line after data rows");
      continue;
    }
    std::size_t fields = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = view.find(',', start);
      const auto field = view.substr(start, comma == std::string_view::npos
                                                ? std::string_view::npos
                                                : comma - start);
      values.push_back(ParseDouble(field, source, line_no));
      ++fields;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (out.line_of_row.empty()) {
      cols = fields;
    } else if (fields != cols) {
      throw DataError(Where(source, line_no) + "expected " + std::to_string(cols) +
                      " columns, found " + std::to_string(fields));
    }
    out.line_of_row.push_back(line_no);
  }
  if (out.line_of_row.empty()) throw DataError(source + ": no data rows");
  out.matrix = Matrix(out.line_of_row.size(), cols);
  std::copy(values.begin(), values.end(), out.matrix.values().begin());
  return out;
}

ParsedCsv ReadCsvFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open file");
  return ParseCsv(in, path.string());
}

}  // namespace

Matrix ParseMatrixCsv(std::istream& in, const std::string& source_name) {
  return ParseCsv(in, source_name).matrix;
}

Matrix ReadMatrixCsv(const std::filesystem::path& path) { return ReadCsvFile(path).matrix; }

PredictionMatrix LoadPredictionCsv(const std::filesystem::path& path) {
  ParsedCsv csv = ReadCsvFile(path);
  const std::string source = path.string();
  if (csv.matrix.cols() < 2) throw DataError(source + ": need at least two columns");
  for (std::size_t i = 0; i < csv.matrix.rows(); ++i) {
    double sum = 0.0;
    for (double v : csv.matrix.row(i)) {
      if (!std::isfinite(v) || v < 0.0 || v > 1.0 + PredictionMatrix::kRowSumTolerance)
        throw DataError(Where(source, csv.line_of_row[i]) + "probability outside [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > PredictionMatrix::kRowSumTolerance)
      throw DataError(Where(source, csv.line_of_row[i]) + "row sums to " + FormatDouble(sum) +
                      ", not 1 within " + FormatDouble(PredictionMatrix::kRowSumTolerance));
  }
  return PredictionMatrix(std::move(csv.matrix));
}

LogitMatrix LoadLogitCsv(const std::filesystem::path& path) {
  ParsedCsv csv = ReadCsvFile(path);
  const std::string source = path.string();
  if (csv.matrix.cols() < 2) throw DataError(source + ": need at least two columns");
  for (std::size_t i = 0; i < csv.matrix.rows(); ++i)
    for (double v : csv.matrix.row(i))
      if (!std::isfinite(v))
        throw DataError(Where(source, csv.line_of_row[i]) + "non-finite logit");
  return LogitMatrix(std::move(csv.matrix));
}

LabelVector LoadLabelsCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  const std::string source = path.string();
  if (!in) throw DataError(source + ": cannot open file");
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = Trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') continue;
    int value = 0;
    const auto [ptr, ec] = std::from_chars(view.data(), view.data() + view.size(), value);
    if (ec != std::errc() || ptr != view.data() + view.size() || value < 0)
      throw DataError(Where(source, line_no) + "malformed label '" + std::string(view) + "'");
    labels.push_back(value);
  }
  if (labels.empty()) throw DataError(source + ": no labels");
  return LabelVector(std::move(labels));
}

std::vector<double> LoadWeightsCsv(const std::filesystem::path& path) {
  const Matrix m = ReadMatrixCsv(path);
  std::vector<double> w(m.values().begin(), m.values().end());
  double sum = 0.0;
  for (double v : w) {
    if (!std::isfinite(v) || v < 0.0)
      throw DataError(path.string() + ": weights must be finite and nonnegative");
    sum += v;
  }
  if (sum <= 0.0) throw DataError(path.string() + ": weights sum to zero");
  for (double& v : w) v /= sum;
  return w;
}

std::string FormatDouble(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void WriteMatrixCsv(std::ostream& out, const Matrix& m) {
  std::string line;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    line.clear();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) line.push_back(',');
      line += FormatDouble(m(i, j));
    }
    line.push_back('\n');
    out << line;
  }
}

void SaveMatrixCsv(const std::filesystem::path& path, const Matrix& m) {
  std::ostringstream out;
  WriteMatrixCsv(out, m);
  WriteTextFile(path, out.str());
}

void SaveLabelsCsv(const std::filesystem::path& path, const LabelVector& labels) {
  std::string text;
  for (int v : labels) {
    text += std::to_string(v);
    text.push_back('\n');
  }
  WriteTextFile(path, text);
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw DataError(path.string() + ": write failed");
}

Manifest ParseManifest(const std::string& json_text, const std::string& source_name,
                       const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(source_name + ": " + e.what());
  }
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return (fp.is_absolute() ? fp : base_dir / fp).lexically_normal().string();
  };
  auto require_string = [&](const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_string())
      throw DataError(source_name + ": " + where + " missing string field '" + key + "'");
    return obj[key].get<std::string>();
  };
  if (!doc.is_object()) throw DataError(source_name + ": manifest must be a JSON object");
  Manifest manifest;
  manifest.mode = ParseStudyMode(require_string(doc, "mode", "manifest"));
  if (!doc.contains("entries") || !doc["entries"].is_array())
    throw DataError(source_name + ": manifest missing array 'entries'");
  std::size_t index = 0;
  for (const auto& item : doc["entries"]) {
    const std::string where = "entry " + std::to_string(index++);
    if (!item.is_object()) throw DataError(source_name + ": " + where + " is not an object");
    ManifestEntry e;
    e.model_id = require_string(item, "model_id", where);
    e.dataset_id = require_string(item, "dataset_id", where);
    e.predictions_path = resolve(require_string(item, "predictions_path", where));
    if (item.contains("logits_path") && !item["logits_path"].is_null())
      e.logits_path = resolve(require_string(item, "logits_path", where));
    if (item.contains("labels_path") && !item["labels_path"].is_null())
      e.labels_path = resolve(require_string(item, "labels_path", where));
    manifest.entries.push_back(std::move(e));
  }
  if (doc.contains("validation")) {
    const auto& val = doc["validation"];
    if (!val.is_object())
      throw DataError(source_name + ": 'validation' must map model ids to objects");
    for (const auto& [model_id, item] : val.items()) {
      const std::string where = "validation '" + model_id + "'";
      ValidationSource src{resolve(require_string(item, "predictions_path", where)),
                           resolve(require_string(item, "labels_path", where))};
      manifest.validation.emplace_back(model_id, std::move(src));
    }
  }
  try {
    manifest.Validate();
  } catch (const DataError& e) {
    throw DataError(source_name + ": " + e.what());
  }
  return manifest;
}

Manifest LoadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseManifest(buffer.str(), path.string(), path.parent_path());
}

std::string ManifestToJson(const Manifest& manifest) {
  json doc;
  doc["mode"] = ToString(manifest.mode);
  json entries = json::array();
  for (const auto& e : manifest.entries) {
    json item;
    item["model_id"] = e.model_id;
    item["dataset_id"] = e.dataset_id;
    item["predictions_path"] = e.predictions_path;
    if (e.logits_path) item["logits_path"] = *e.logits_path;
    if (e.labels_path) item["labels_path"] = *e.labels_path;
    entries.push_back(std::move(item));
  }
  doc["entries"] = std::move(entries);
  if (!manifest.validation.empty()) {
    json val = json::object();
    for (const auto& [id, src] : manifest.validation)
      val[id] = {{"predictions_path", src.predictions_path}, {"labels_path", src.labels_path}};
    doc["validation"] = std::move(val);
  }
  return doc.dump(2) + "\n";
}

void SaveManifest(const std::filesystem::path& path, const Manifest& manifest) {
  WriteTextFile(path, ManifestToJson(manifest));
}

}  // namespace predmat::io
