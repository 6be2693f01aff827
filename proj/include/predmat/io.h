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

#ifndef PREDMAT_IO_H_
#define PREDMAT_IO_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "predmat/core.h"

namespace predmat::io {

// CSV matrices: one row per sample, comma-separated decimals, no header. A
// leading line starting with '#' is skipped. Parse failures raise DataError
// naming the file and 1-based line.
Matrix ReadMatrixCsv(const std::filesystem::path& path);
Matrix ParseMatrixCsv(std::istream& in, const std::string& source_name);

PredictionMatrix LoadPredictionCsv(const std::filesystem::path& path);
LogitMatrix LoadLogitCsv(const std::filesystem::path& path);
// One integer per line.
LabelVector LoadLabelsCsv(const std::filesystem::path& path);
// k nonnegative reals on one line (or one per line), normalized to sum 1.
std::vector<double> LoadWeightsCsv(const std::filesystem::path& path);

// Canonical writer: shortest round-trip decimal for each value, so that
// reading a written matrix reproduces it bit for bit.
void WriteMatrixCsv(std::ostream& out, const Matrix& m);
void SaveMatrixCsv(const std::filesystem::path& path, const Matrix& m);
void SaveLabelsCsv(const std::filesystem::path& path, const LabelVector& labels);

std::string FormatDouble(double value);

// Manifest JSON. Relative paths inside the manifest are resolved against
// the manifest's directory.
Manifest LoadManifest(const std::filesystem::path& path);
Manifest ParseManifest(const std::string& json_text, const std::string& source_name,
                       const std::filesystem::path& base_dir);
std::string ManifestToJson(const Manifest& manifest);
void SaveManifest(const std::filesystem::path& path, const Manifest& manifest);

void WriteTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace predmat::io

#endif  // PREDMAT_IO_H_
