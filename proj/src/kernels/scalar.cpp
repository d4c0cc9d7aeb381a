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

#include "kernels/scalar.hpp"

#include "kernels/bits.hpp"

namespace wpd::kernels::scalar {

void apply_1q(cplx *amps, unsigned num_qubits, unsigned target,
              std::uint64_t ctrl_mask, std::uint64_t ctrl_value,
              const Mat2 &m) {
    const bits::FixedBits fixed(ctrl_mask, target);
    const std::uint64_t count = std::uint64_t{1} << (num_qubits - fixed.count);
    const std::uint64_t stride = std::uint64_t{1} << target;
    for (std::uint64_t k = 0; k < count; ++k) {
        const std::uint64_t i0 =
            bits::insert_zero_bits(k, fixed.span()) | ctrl_value;
        const std::uint64_t i1 = i0 | stride;
        const cplx a0 = amps[i0];
        const cplx a1 = amps[i1];
        amps[i0] = m.m00 * a0 + m.m01 * a1;
        amps[i1] = m.m10 * a0 + m.m11 * a1;
    }
}

void apply_diagonal(cplx *amps, unsigned num_qubits,
                    std::span<const unsigned> qubits, const cplx *factors) {
    const std::uint64_t dim = std::uint64_t{1} << num_qubits;
    if (const int lo = bits::contiguous_base(qubits); lo >= 0) {
        const std::uint64_t mask = (std::uint64_t{1} << qubits.size()) - 1;
        for (std::uint64_t i = 0; i < dim; ++i) {
            amps[i] *= factors[(i >> lo) & mask];
        }
        return;
    }
    for (std::uint64_t i = 0; i < dim; ++i) {
        amps[i] *= factors[bits::extract_bits(i, qubits)];
    }
}

void abs2(const cplx *amps, std::size_t dim, double *out) {
    for (std::size_t i = 0; i < dim; ++i) {
        out[i] = std::norm(amps[i]);
    }
}

double norm2(const cplx *amps, std::size_t dim) {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        s += std::norm(amps[i]);
    }
    return s;
}

} // namespace wpd::kernels::scalar
