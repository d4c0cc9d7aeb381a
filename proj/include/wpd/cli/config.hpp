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

/**
 * @file
 * Experiment configuration files.
 *
 * A config is a JSON object. Example:
 *
 *     {
 *       "experiment": "sweep_theta",
 *       "N": 4,
 *       "theta": {"start": 0, "stop": 1, "points": 21},
 *       "theta_units": "pi",
 *       "quantities": ["V_C", "V_P", "D"],
 *       "shots": 8000,
 *       "seed": 7,
 *       "noise": {"epsilon": 0.057, "T": 0.854, "gamma": 1.02}
 *     }
 *
 * Unknown keys are rejected. Every error carries the line and column of the
 * offending key in the source text.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wpd/noise.hpp"

namespace wpd::cli {

enum class Experiment { Fringes, SweepTheta, EstimateVP, Fit, OracleCheck };

const char *experiment_name(Experiment e);

struct FitConfig {
    ParamMask free{true, true, true};
    NoiseParams initial_guess = NoiseParams::ideal();
    unsigned multistarts = 8;
    bool uniform_weights = false;
    std::uint64_t seed = 0;
    /// CSV with columns theta,quantity,value,sigma (theta in radians). When
    /// empty, data are simulated at the config's noise parameters.
    std::string observations;

    bool operator==(const FitConfig &) const = default;
};

struct ExperimentConfig {
    Experiment experiment = Experiment::SweepTheta;
    unsigned N = 2;
    std::vector<double> theta;  ///< radians
    std::vector<double> phases; ///< fringe phase grid, radians
    std::vector<Observable> quantities{Observable::VC, Observable::D};
    std::uint64_t shots = 8000; ///< 0: exact probabilities
    std::uint64_t seed = 1;
    NoiseParams noise = NoiseParams::ideal();
    FitConfig fit;
    std::uint64_t oracle_samples = 100000;
    unsigned vp_cap = kDefaultVpCap;
    std::string output_dir = "results";
    bool plots = true;

    bool operator==(const ExperimentConfig &) const = default;
};

class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string &source, int line, int column,
                const std::string &path, const std::string &message);

    int line() const { return line_; }
    int column() const { return column_; }
    /// JSON pointer of the offending value, "" for the document.
    const std::string &path() const { return path_; }

  private:
    int line_;
    int column_;
    std::string path_;
};

/// Parses and validates; throws ConfigError.
ExperimentConfig parse_config(const std::string &text,
                              const std::string &source = "<config>");
ExperimentConfig load_config(const std::filesystem::path &path);

/// Fully resolved form (theta in radians, every field explicit);
/// parse_config(to_json(c).dump()) == c.
nlohmann::ordered_json to_json(const ExperimentConfig &config);

/// Checks cross-field constraints; throws ConfigError with the JSON pointer
/// of the offending field but no position.
void validate(const ExperimentConfig &config);

struct Overrides {
    std::optional<std::string> output_dir;
    std::optional<std::uint64_t> seed;
    bool ideal = false;
};

void apply_overrides(ExperimentConfig &config, const Overrides &overrides);

} // namespace wpd::cli
