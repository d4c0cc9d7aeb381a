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

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <span>

namespace wpd::bits {

// Internal linkage: this header is also compiled into the AVX2 translation
// unit, whose copies must never be merged with the baseline ones.
namespace {

/// Spreads the bits of `k` over the positions not listed in `sorted_fixed`
/// (ascending), leaving zeros at the listed positions.
inline std::uint64_t insert_zero_bits(std::uint64_t k,
                                      std::span<const unsigned> sorted_fixed) {
    for (unsigned p : sorted_fixed) {
        const std::uint64_t low = k & ((std::uint64_t{1} << p) - 1);
        k = ((k >> p) << (p + 1)) | low;
    }
    return k;
}

/// Gathers bit `qubits[b]` of `index` into bit b of the result.
inline std::uint64_t extract_bits(std::uint64_t index,
                                  std::span<const unsigned> qubits) {
    std::uint64_t out = 0;
    for (std::size_t b = 0; b < qubits.size(); ++b) {
        out |= ((index >> qubits[b]) & 1U) << b;
    }
    return out;
}

/// Lowest qubit of `qubits` when they are lo, lo + 1, ... in order, so that
/// extract_bits reduces to a shift and mask; -1 otherwise.
inline int contiguous_base(std::span<const unsigned> qubits) {
    for (std::size_t b = 1; b < qubits.size(); ++b) {
        if (qubits[b] != qubits[0] + b) {
            return -1;
        }
    }
    return qubits.empty() ? -1 : static_cast<int>(qubits[0]);
}

/// Inverse of extract_bits: scatters bit b of `value` to bit `qubits[b]`.
inline std::uint64_t deposit_bits(std::uint64_t value,
                                  std::span<const unsigned> qubits) {
    std::uint64_t out = 0;
    for (std::size_t b = 0; b < qubits.size(); ++b) {
        out |= ((value >> b) & 1U) << qubits[b];
    }
    return out;
}

/// Ascending list of the set bits of `mask` plus `extra`, at most 64 entries.
struct FixedBits {
    std::array<unsigned, 64> pos{};
    unsigned count = 0;

    FixedBits(std::uint64_t mask, unsigned extra) {
        mask |= std::uint64_t{1} << extra;
        while (mask != 0) {
            pos[count++] = static_cast<unsigned>(std::countr_zero(mask));
            mask &= mask - 1;
        }
    }
    std::span<const unsigned> span() const { return {pos.data(), count}; }
};

} // namespace

} // namespace wpd::bits
