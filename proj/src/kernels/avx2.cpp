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

// Compiled with -mavx2 -mfma. Only reached through the dispatch table after
// a CPUID check. Complex values are handled as interleaved (re, im) doubles;
// std::complex arithmetic is deliberately not instantiated here.

#include <immintrin.h>

#include "kernels/bits.hpp"
#include "kernels/scalar.hpp"

namespace wpd::kernels::avx2 {
namespace {

// Packed layout: one __m256d holds two complex numbers [re0, im0, re1, im1].

inline __m256d broadcast(const cplx &z) {
    const double *p = reinterpret_cast<const double *>(&z);
    return _mm256_setr_pd(p[0], p[1], p[0], p[1]);
}

inline __m256d pack(const cplx &lo, const cplx &hi) {
    const double *a = reinterpret_cast<const double *>(&lo);
    const double *b = reinterpret_cast<const double *>(&hi);
    return _mm256_setr_pd(a[0], a[1], b[0], b[1]);
}

/// Lane-wise complex product a * b.
inline __m256d cmul(__m256d a, __m256d b) {
    const __m256d a_re = _mm256_movedup_pd(a);
    const __m256d a_im = _mm256_permute_pd(a, 0b1111);
    const __m256d b_swap = _mm256_permute_pd(b, 0b0101);
    return _mm256_fmaddsub_pd(a_re, b, _mm256_mul_pd(a_im, b_swap));
}

inline __m256d load2(const cplx *p) {
    return _mm256_loadu_pd(reinterpret_cast<const double *>(p));
}

inline void store2(cplx *p, __m256d v) {
    _mm256_storeu_pd(reinterpret_cast<double *>(p), v);
}

} // namespace

void apply_1q(cplx *amps, unsigned num_qubits, unsigned target,
              std::uint64_t ctrl_mask, std::uint64_t ctrl_value,
              const Mat2 &m) {
    const bits::FixedBits fixed(ctrl_mask, target);
    const std::uint64_t count = std::uint64_t{1} << (num_qubits - fixed.count);
    const std::uint64_t stride = std::uint64_t{1} << target;

    if (target == 0 && (ctrl_mask & 1U) == 0) {
        // Each pair is contiguous: v = [a0, a1].
        const __m256d col0 = pack(m.m00, m.m10);
        const __m256d col1 = pack(m.m01, m.m11);
        for (std::uint64_t k = 0; k < count; ++k) {
            const std::uint64_t i0 =
                bits::insert_zero_bits(k, fixed.span()) | ctrl_value;
            const __m256d v = load2(amps + i0);
            const __m256d lo = _mm256_permute2f128_pd(v, v, 0x00);
            const __m256d hi = _mm256_permute2f128_pd(v, v, 0x11);
            store2(amps + i0, _mm256_add_pd(cmul(col0, lo), cmul(col1, hi)));
        }
        return;
    }
    if ((ctrl_mask & 1U) != 0 || count < 2) {
        scalar::apply_1q(amps, num_qubits, target, ctrl_mask, ctrl_value, m);
        return;
    }

    // Bit 0 is free, so indices for k and k + 1 are adjacent.
    const __m256d m00 = broadcast(m.m00);
    const __m256d m01 = broadcast(m.m01);
    const __m256d m10 = broadcast(m.m10);
    const __m256d m11 = broadcast(m.m11);
    for (std::uint64_t k = 0; k < count; k += 2) {
        const std::uint64_t i0 =
            bits::insert_zero_bits(k, fixed.span()) | ctrl_value;
        const std::uint64_t i1 = i0 | stride;
        const __m256d a0 = load2(amps + i0);
        const __m256d a1 = load2(amps + i1);
        store2(amps + i0, _mm256_add_pd(cmul(m00, a0), cmul(m01, a1)));
        store2(amps + i1, _mm256_add_pd(cmul(m10, a0), cmul(m11, a1)));
    }
}

void apply_diagonal(cplx *amps, unsigned num_qubits,
                    std::span<const unsigned> qubits, const cplx *factors) {
    const std::uint64_t dim = std::uint64_t{1} << num_qubits;
    if (dim < 2) {
        scalar::apply_diagonal(amps, num_qubits, qubits, factors);
        return;
    }
    if (const int lo = bits::contiguous_base(qubits); lo >= 0) {
        const std::uint64_t mask = (std::uint64_t{1} << qubits.size()) - 1;
        for (std::uint64_t i = 0; i < dim; i += 2) {
            const cplx &f0 = factors[(i >> lo) & mask];
            const cplx &f1 = factors[((i + 1) >> lo) & mask];
            store2(amps + i, cmul(load2(amps + i), pack(f0, f1)));
        }
        return;
    }
    for (std::uint64_t i = 0; i < dim; i += 2) {
        const cplx &f0 = factors[bits::extract_bits(i, qubits)];
        const cplx &f1 = factors[bits::extract_bits(i + 1, qubits)];
        store2(amps + i, cmul(load2(amps + i), pack(f0, f1)));
    }
}

void abs2(const cplx *amps, std::size_t dim, double *out) {
    std::size_t i = 0;
    for (; i + 4 <= dim; i += 4) {
        const __m256d v0 = load2(amps + i);
        const __m256d v1 = load2(amps + i + 2);
        // hadd -> [|a0|^2, |a2|^2, |a1|^2, |a3|^2]
        const __m256d h =
            _mm256_hadd_pd(_mm256_mul_pd(v0, v0), _mm256_mul_pd(v1, v1));
        _mm256_storeu_pd(out + i, _mm256_permute4x64_pd(h, 0b11011000));
    }
    if (i < dim) {
        scalar::abs2(amps + i, dim - i, out + i);
    }
}

double norm2(const cplx *amps, std::size_t dim) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= dim; i += 4) {
        const __m256d v0 = load2(amps + i);
        const __m256d v1 = load2(amps + i + 2);
        acc0 = _mm256_fmadd_pd(v0, v0, acc0);
        acc1 = _mm256_fmadd_pd(v1, v1, acc1);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    if (i < dim) {
        s += scalar::norm2(amps + i, dim - i);
    }
    return s;
}

} // namespace wpd::kernels::avx2
