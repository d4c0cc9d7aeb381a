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

#include "wpd/kernels.hpp"

namespace wpd::kernels::scalar {

void apply_1q(cplx *amps, unsigned num_qubits, unsigned target,
              std::uint64_t ctrl_mask, std::uint64_t ctrl_value, const Mat2 &m);
void apply_diagonal(cplx *amps, unsigned num_qubits,
                    std::span<const unsigned> qubits, const cplx *factors);
void abs2(const cplx *amps, std::size_t dim, double *out);
double norm2(const cplx *amps, std::size_t dim);

} // namespace wpd::kernels::scalar

namespace wpd::kernels::avx2 {

// Defined only in the AVX2 translation unit; call through the dispatch table.
void apply_1q(cplx *amps, unsigned num_qubits, unsigned target,
              std::uint64_t ctrl_mask, std::uint64_t ctrl_value, const Mat2 &m);
void apply_diagonal(cplx *amps, unsigned num_qubits,
                    std::span<const unsigned> qubits, const cplx *factors);
void abs2(const cplx *amps, std::size_t dim, double *out);
double norm2(const cplx *amps, std::size_t dim);

} // namespace wpd::kernels::avx2
