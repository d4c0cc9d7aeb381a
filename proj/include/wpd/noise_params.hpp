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

#include <numbers>

namespace wpd {

/// Three-parameter imperfection model of an interferometer run.
///
///   epsilon  every qubit starts in (1 - epsilon)|0><0| + epsilon|1><1|
///   T        every beam-splitter Hadamard becomes [[T, s], [s, -T]],
///            s = sqrt(1 - T^2)
///   gamma    every rotation angle theta becomes gamma * theta
struct NoiseParams {
    double epsilon = 0.0;
    double T = std::numbers::sqrt2 / 2;
    double gamma = 1.0;

    static constexpr NoiseParams ideal() { return {}; }

    bool is_ideal() const {
        return epsilon == 0.0 && T == ideal().T && gamma == 1.0;
    }

    /// epsilon in [0, 0.5], T in (0, 1), gamma in [0, 2];
    /// throws std::invalid_argument otherwise.
    void validate() const;

    bool operator==(const NoiseParams &) const = default;
};

} // namespace wpd
