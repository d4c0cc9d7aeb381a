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
 * Data-parallel inner loops of the state backends.
 *
 * Every kernel exists as a scalar reference implementation and, on x86-64,
 * as an AVX2+FMA variant. The variant is chosen once at startup from CPUID
 * (overridable through the WPD_KERNELS environment variable, "scalar" or
 * "avx2") and the two are equivalence-tested against each other.
 *
 * Amplitudes are indexed with qubit 0 as the least-significant bit.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace wpd::kernels {

using cplx = std::complex<double>;

/// Row-major 2x2 complex matrix.
struct Mat2 {
    cplx m00, m01, m10, m11;
};

struct KernelTable {
    std::string_view name;

    /// Applies `m` to `target` on every basis index whose bits under
    /// `ctrl_mask` equal `ctrl_value`. `target` must not be in `ctrl_mask`.
    void (*apply_1q)(cplx *amps, unsigned num_qubits, unsigned target,
                     std::uint64_t ctrl_mask, std::uint64_t ctrl_value,
                     const Mat2 &m);

    /// amps[i] *= factors[bits of i at `qubits`], `qubits[0]` being the
    /// least-significant bit of the factor index.
    void (*apply_diagonal)(cplx *amps, unsigned num_qubits,
                           std::span<const unsigned> qubits,
                           const cplx *factors);

    /// out[i] = |amps[i]|^2
    void (*abs2)(const cplx *amps, std::size_t dim, double *out);

    /// Sum of |amps[i]|^2.
    double (*norm2)(const cplx *amps, std::size_t dim);
};

enum class Backend { Scalar, Avx2 };

const KernelTable &scalar_kernels();

/// True when the variant was compiled in and the running CPU supports it.
bool backend_available(Backend backend);

/// Throws std::invalid_argument when the backend is unavailable.
const KernelTable &kernels_for(Backend backend);

const KernelTable &active_kernels();
Backend active_backend();
void set_active_backend(Backend backend);

std::string_view backend_name(Backend backend);

} // namespace wpd::kernels
