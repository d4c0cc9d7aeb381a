// Copyright 2026 The wpd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpd::cli {

/// Input file missing, unparsable, or not a results document of the
/// expected schema.
class ReportError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ReportRow {
    std::string file;
    std::string experiment;
    unsigned N = 0;
    double theta = 0.0;
    std::optional<double> D, V_C, V_P;
    std::optional<double> D_err, V_C_err, V_P_err;
    std::optional<double> residual_equality;   ///< D^2 + V_P^2 - 1
    std::optional<double> residual_inequality; ///< D^2 + V_C^2 - 1
    std::vector<std::string> flags;
};

struct Report {
    std::vector<ReportRow> rows;
    std::size_t flagged = 0;
};

/// Loads every file before producing anything, so a bad input yields no
/// partial table. Throws ReportError; an empty list is an error.
Report build_report(const std::vector<std::filesystem::path> &files);

/// Fixed-width text table plus a trailing flag summary.
std::string format_report(const Report &report);

} // namespace wpd::cli
