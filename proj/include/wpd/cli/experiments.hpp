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
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wpd/cli/config.hpp"

namespace wpd::cli {

inline constexpr const char *kResultsSchema = "wpd.results/1";

struct ExperimentOutput {
    /// results.json: schema tag, config echo, per-point records, summary.
    nlohmann::ordered_json results;
    /// raw.csv: one line per circuit setting (or per observation for fits).
    std::string raw_csv;
    /// File name and content of each plot.
    std::vector<std::pair<std::string, std::string>> plots;
    /// Invariant breaches found while running; non-empty means exit code 3.
    std::vector<std::string> violations;
};

/// Runs the configured experiment. Sweep points are spread over `threads`
/// workers; the output does not depend on the thread count.
ExperimentOutput run_experiment(const ExperimentConfig &config,
                                unsigned threads = 1);

/// Writes results.json, raw.csv and (when `plots`) the SVG files into
/// `dir`, creating it if needed. Throws std::runtime_error on I/O failure.
void write_outputs(const ExperimentOutput &output,
                   const std::filesystem::path &dir, bool plots);

/// CSV with header theta,quantity,value,sigma; theta in radians.
std::vector<Observation> read_observations(const std::filesystem::path &path);

} // namespace wpd::cli
