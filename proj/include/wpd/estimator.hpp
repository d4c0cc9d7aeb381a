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
 * Measurement protocols for D, V_C and V_P.
 *
 * Each protocol runs circuits, reads the probability of the all-zero outcome,
 * and combines those numbers:
 *
 *   D    N detector readouts U_k^dagger, k = 0..N-1:
 *          D^2 = N / (N - 1) * (1 - (1/N) sum_k p_d(0|k))
 *   V_C  one particle readout at phi = 0:
 *          V_C = N / (N - 1) * |p_p(0|0) - 1/N|
 *   V_P  particle readouts at all 2^N settings phi in {0, pi}^N:
 *          V_P^2 = N^3 / (2^(N+1) (N - 1)) * sum_phi (p_p(0|phi) - 1/N)^2
 *
 * shots == 0 substitutes exact Born probabilities for the sampled
 * frequencies; std_error is then 0. With shots > 0, setting i is sampled
 * with seed + i and std_error is the first-order propagation of the binomial
 * variances p (1 - p) / shots.
 */
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wpd/circuit.hpp"

namespace wpd {

inline constexpr unsigned kDefaultVpCap = 16;

struct EstimateResult {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t shots_per_setting = 0;
    std::uint64_t settings_used = 0;
    /// A radicand left [0, 1] through shot noise and was clamped.
    bool clamped = false;
    /// Estimated probability of the all-zero outcome, per setting.
    std::vector<double> p0;
    /// Counts of the all-zero outcome, per setting (empty in exact mode).
    std::vector<std::uint64_t> counts0;
};

struct EstimatorOptions {
    unsigned threads = 1;
    /// Shared block cache; only used when threads == 1.
    SimCache *cache = nullptr;
    /// Largest N for which estimate_VP enumerates 2^N settings.
    unsigned vp_cap = kDefaultVpCap;
};

EstimateResult estimate_D(const InterferometerSpec &spec, std::uint64_t shots,
                          std::uint64_t seed,
                          const EstimatorOptions &options = {});

EstimateResult estimate_VC(const InterferometerSpec &spec, std::uint64_t shots,
                           std::uint64_t seed,
                           const EstimatorOptions &options = {});

/// Setting index b maps to phi_i = pi for every set bit i of b.
EstimateResult estimate_VP(const InterferometerSpec &spec, std::uint64_t shots,
                           std::uint64_t seed,
                           const EstimatorOptions &options = {});

enum class EstimatorKind { D, VC, VP };

/// Point value of an estimator from zero-outcome probabilities, one per
/// setting in the order the estimate functions use; radicands clamped.
double estimator_value(EstimatorKind kind, unsigned num_paths,
                       std::span<const double> p0);

/// Parametric bootstrap of a sampled estimate: every setting's zero count
/// is redrawn from Binomial(shots, p0) and the estimator recomputed.
/// Slower than the propagated std_error; meant as a cross-check.
double bootstrap_std_error(const EstimateResult &result, EstimatorKind kind,
                           unsigned num_paths, unsigned resamples = 200,
                           std::uint64_t seed = 0);

/// Monte Carlo over phi uniform in [0, 2 pi)^N with exact circuit
/// probabilities: sqrt(N^3 / (N - 1) * mean((p - 1/N)^2)).
double phase_average_oracle(const InterferometerSpec &spec,
                            std::uint64_t num_phase_samples, std::uint64_t seed,
                            const EstimatorOptions &options = {});

/// N = 2 fringes: particle readouts at phases (0, phi) over a grid.
struct FringeData {
    std::vector<double> phi_grid;
    std::vector<std::uint64_t> counts0; ///< empty in exact mode
    std::vector<std::uint64_t> counts1; ///< empty in exact mode
    std::uint64_t shots = 0;
    /// Normalized count rate of outcome 0 (exact probability if shots == 0).
    std::vector<double> p0;
};

/// Evenly spaced grid of `points` phases on [0, 2 pi).
std::vector<double> default_phi_grid(unsigned points = 16);

FringeData record_fringes(const InterferometerSpec &spec,
                          const std::vector<double> &phi_grid,
                          std::uint64_t shots, std::uint64_t seed,
                          const EstimatorOptions &options = {});

/// a sin(phi + delta) + c, fitted linearly as a1 sin(phi) + a2 cos(phi) + c.
struct SineFit {
    double amplitude = 0.0;   ///< a >= 0
    double offset = 0.0;      ///< c
    double phase_shift = 0.0; ///< delta
    double residual = 0.0;    ///< sum of squared residuals
    double visibility = 0.0;  ///< 2 a
    double visibility_std_error = 0.0;
};

/// Throws std::runtime_error when the normal equations are singular.
SineFit fit_sine(const FringeData &data);

/// N = 2 visibility from a sine fit to fringes on default_phi_grid(points);
/// `shots` per phase. p0/counts0 hold the fringe readouts.
EstimateResult estimate_fringe_visibility(const InterferometerSpec &spec,
                                          std::uint64_t shots,
                                          std::uint64_t seed,
                                          const EstimatorOptions &options = {},
                                          unsigned points = 16);

} // namespace wpd
