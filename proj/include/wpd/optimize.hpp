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

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace wpd {

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
    /// Initial simplex edge as a fraction of each box width.
    double initial_step = 0.1;
    /// Stop when the spread of simplex values and the simplex diameter
    /// both drop below these.
    double ftol = 1e-10;
    double xtol = 1e-7;
    unsigned max_evals = 4000;
    /// Rebuild the simplex around the best point this many times; guards
    /// against collapse onto a non-stationary point.
    unsigned restarts = 1;
};

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    unsigned evaluations = 0;
    bool converged = false;
};

/// Box-bounded Nelder-Mead; trial points are projected onto the box.
MinimizeResult nelder_mead(const Objective &f, std::vector<double> x0,
                           std::span<const double> lower,
                           std::span<const double> upper,
                           const NelderMeadOptions &options = {});

/// Central-difference Hessian. Steps shrink near the box faces so every
/// evaluation stays inside.
Eigen::MatrixXd finite_difference_hessian(const Objective &f,
                                          std::span<const double> x,
                                          std::span<const double> lower,
                                          std::span<const double> upper,
                                          double step = 1e-4);

} // namespace wpd
