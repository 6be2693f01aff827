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

#ifndef PREDMAT_CLI_H_
#define PREDMAT_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace predmat::cli {

// Prefix of the environment variables that supply option values, e.g.
// PREDMAT_THREADS for --threads. Precedence: command line, environment,
// config file, built-in default.
inline constexpr const char* kEnvPrefix = "PREDMAT_";

// Entry point of the predmat tool. args excludes the program name. Reports
// go to `out` unless --out names a file; diagnostics go to `err`. Returns
// 0 on success, 2 for configuration errors, 3 for data errors and 4 for
// numerical failures.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace predmat::cli

#endif  // PREDMAT_CLI_H_
