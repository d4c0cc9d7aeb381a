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
 * Model curves for imperfect interferometers and fitting of (epsilon, T,
 * gamma) to observed D and visibility values.
 *
 * Model values always come from exact circuit probabilities pushed through
 * the measurement protocols of estimator.hpp, so they include every effect
 * the noise has on the protocol itself.
 */
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wpd/circuit.hpp"
#include "wpd/estimator.hpp"
#include "wpd/noise_params.hpp"

namespace wpd {

/// VF is the N = 2 fringe-fit visibility.
enum class Observable { VC, VP, D, VF };

const char *observable_name(Observable q);
/// Accepts "V_C", "V_P", "D", "V_F" (case-insensitive, underscore optional).
Observable parse_observable(const std::string &name);

/// Copy of `spec` with `params` installed; throws on out-of-range params.
InterferometerSpec apply_noise_model(InterferometerSpec spec,
                                     const NoiseParams &params);

/// Exact protocol values of `q` for the rotation family at each theta.
std::vector<double> model_curves(unsigned num_paths,
                                 std::span<const double> theta_grid,
                                 const NoiseParams &params, Observable q,
                                 const EstimatorOptions &options = {});

struct Observation {
    double theta = 0.0;
    Observable quantity = Observable::VC;
    double value = 0.0;
    double sigma = 1.0;
};

/// Simulated data at `params`: exact values with sigma = 1 when shots == 0,
/// otherwise sampled estimates with their propagated std_error (floored at
/// kMinSigma) as sigma.
std::vector<Observation>
synthesize_observations(unsigned num_paths, std::span<const double> thetas,
                        std::span<const Observable> quantities,
                        const NoiseParams &params, std::uint64_t shots,
                        std::uint64_t seed);

inline constexpr double kMinSigma = 1e-4;

/// Parameter order everywhere: epsilon, T, gamma.
using ParamArray = std::array<double, 3>;
using ParamMask = std::array<bool, 3>;

ParamArray to_array(const NoiseParams &p);
NoiseParams from_array(const ParamArray &a);

struct FitBox {
    ParamArray lower{0.0, 0.70710678118654752, 0.0};
    ParamArray upper{0.5, 0.999, 2.0};
};

struct FitOptions {
    ParamMask free{true, true, true};
    NoiseParams initial_guess = NoiseParams::ideal();
    FitBox box;
    unsigned multistarts = 8;
    std::uint64_t seed = 0;
    /// Ignore sigma and weight every point equally; std_errors are then
    /// scaled by the residual variance.
    bool uniform_weights = false;
    /// Multistarts evaluated in parallel.
    unsigned threads = 1;
    /// Starts whose optima differ by more than this mark the fit
    /// unconverged.
    double agreement_tol = 1e-3;
};

struct FitResult {
    NoiseParams params;
    ParamMask fixed_mask{false, false, false};
    /// Empty for fixed parameters.
    std::array<std::optional<double>, 3> std_errors;
    double residual_sum = 0.0;
    bool converged = false;
    unsigned evaluations = 0;
    /// Optimum of every start, in start order.
    std::vector<ParamArray> start_optima;
    std::vector<double> start_values;
};

/// Weighted least squares over the free parameters. Throws
/// std::invalid_argument with no free parameter, fewer observations than
/// free parameters, or a non-positive sigma.
FitResult fit_noise_params(std::span<const Observation> observations,
                           unsigned num_paths, const FitOptions &options = {});

/// "0.072(3)": value rounded to the first significant digit of the error,
/// two digits when that digit is 1.
std::string format_uncertainty(double value, double std_error);

} // namespace wpd
