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

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "wpd/statevec.hpp"

namespace wpd {

// Multinomial draw as a chain of conditional binomials: outcome i takes
// Binomial(remaining shots, p_i / remaining mass).
std::vector<std::uint64_t> sample_counts(std::span<const double> probabilities,
                                         std::uint64_t shots,
                                         std::uint64_t seed) {
    if (probabilities.empty()) {
        throw std::invalid_argument("sample_counts: empty distribution");
    }
    if (shots < 1) {
        throw std::invalid_argument("sample_counts: need at least one shot");
    }
    double total = 0.0;
    for (double p : probabilities) {
        if (!(p >= -1e-12)) {
            throw std::invalid_argument("sample_counts: negative probability " +
                                        std::to_string(p));
        }
        total += std::max(p, 0.0);
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("sample_counts: probabilities sum to " +
                                    std::to_string(total));
    }

    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> counts(probabilities.size(), 0);
    std::uint64_t remaining = shots;
    double mass = total;
    for (std::size_t i = 0; i + 1 < probabilities.size() && remaining > 0;
         ++i) {
        const double p = std::max(probabilities[i], 0.0);
        const double cond = mass > 0.0 ? std::clamp(p / mass, 0.0, 1.0) : 0.0;
        std::uint64_t c = 0;
        if (cond >= 1.0) {
            c = remaining;
        } else if (cond > 0.0) {
            std::binomial_distribution<std::uint64_t> draw(remaining, cond);
            c = draw(rng);
        }
        counts[i] = c;
        remaining -= c;
        mass -= p;
    }
    counts.back() += remaining;
    return counts;
}

} // namespace wpd
