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

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "wpd/kernels.hpp"

using namespace wpd::kernels;

namespace {

std::vector<cplx> random_state(unsigned nq, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    std::vector<cplx> a(std::size_t{1} << nq);
    for (auto &x : a) {
        x = {g(rng), g(rng)};
    }
    return a;
}

Mat2 random_mat(std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    return {
        {g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}};
}

double max_diff(const std::vector<cplx> &a, const std::vector<cplx> &b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d;
}

} // namespace

TEST_CASE("scalar apply_1q matches a direct loop") {
    std::mt19937_64 rng(1);
    const unsigned nq = 4;
    for (unsigned target = 0; target < nq; ++target) {
        auto a = random_state(nq, rng);
        auto ref = a;
        const Mat2 m = random_mat(rng);
        const std::uint64_t mask = target == 0 ? 0b0110 : 0b0001;
        const std::uint64_t value = target == 0 ? 0b0100 : 0b0001;
        scalar_kernels().apply_1q(a.data(), nq, target, mask, value, m);
        for (std::size_t i = 0; i < ref.size(); ++i) {
            if ((i >> target) & 1 || (i & mask) != value) {
                continue;
            }
            const std::size_t j = i | (std::size_t{1} << target);
            const cplx x = ref[i], y = ref[j];
            ref[i] = m.m00 * x + m.m01 * y;
            ref[j] = m.m10 * x + m.m11 * y;
        }
        CHECK(max_diff(a, ref) < 1e-14);
    }
}

TEST_CASE("scalar apply_diagonal handles non-contiguous qubit lists") {
    std::mt19937_64 rng(2);
    const unsigned nq = 5;
    auto a = random_state(nq, rng);
    auto ref = a;
    const std::vector<unsigned> qubits{3, 0, 4};
    std::vector<cplx> f(8);
    for (std::size_t x = 0; x < 8; ++x) {
        f[x] = std::polar(1.0, 0.3 * double(x) + 0.1);
    }
    scalar_kernels().apply_diagonal(a.data(), nq, qubits, f.data());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const std::size_t x =
            ((i >> 3) & 1) | (((i >> 0) & 1) << 1) | (((i >> 4) & 1) << 2);
        ref[i] *= f[x];
    }
    CHECK(max_diff(a, ref) < 1e-14);
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
    if (!backend_available(Backend::Avx2)) {
        SKIP("AVX2 not available on this CPU");
    }
    const KernelTable &s = kernels_for(Backend::Scalar);
    const KernelTable &v = kernels_for(Backend::Avx2);
    std::mt19937_64 rng(3);
    for (unsigned nq = 1; nq <= 7; ++nq) {
        for (unsigned target = 0; target < nq; ++target) {
            for (std::uint64_t mask : {0ULL, 1ULL, 0b101ULL, 0b1000ULL}) {
                mask &= ~(1ULL << target) & ((1ULL << nq) - 1);
                std::uniform_int_distribution<std::uint64_t> pick(0, mask);
                const std::uint64_t value = pick(rng) & mask;
                auto a = random_state(nq, rng);
                auto b = a;
                const Mat2 m = random_mat(rng);
                s.apply_1q(a.data(), nq, target, mask, value, m);
                v.apply_1q(b.data(), nq, target, mask, value, m);
                INFO("nq=" << nq << " target=" << target << " mask=" << mask);
                CHECK(max_diff(a, b) < 1e-13);
            }
        }
        for (const std::vector<unsigned> &qs :
             std::vector<std::vector<unsigned>>{{0}, {nq - 1}, {0, nq - 1}}) {
            if (qs.size() == 2 && nq < 2) {
                continue;
            }
            auto a = random_state(nq, rng);
            auto b = a;
            std::vector<cplx> f(std::size_t{1} << qs.size());
            for (auto &x : f) {
                x = std::polar(1.0,
                               std::uniform_real_distribution<>(0, 6)(rng));
            }
            s.apply_diagonal(a.data(), nq, qs, f.data());
            v.apply_diagonal(b.data(), nq, qs, f.data());
            CHECK(max_diff(a, b) < 1e-13);
        }
        auto a = random_state(nq, rng);
        std::vector<double> pa(a.size()), pb(a.size());
        s.abs2(a.data(), a.size(), pa.data());
        v.abs2(a.data(), a.size(), pb.data());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(pa[i] == Catch::Approx(pb[i]).epsilon(1e-14));
        }
        CHECK(s.norm2(a.data(), a.size()) ==
              Catch::Approx(v.norm2(a.data(), a.size())).epsilon(1e-13));
    }
}

TEST_CASE("backend switching") {
    const Backend before = active_backend();
    set_active_backend(Backend::Scalar);
    CHECK(active_backend() == Backend::Scalar);
    CHECK(active_kernels().name == scalar_kernels().name);
    if (!backend_available(Backend::Avx2)) {
        CHECK_THROWS_AS(kernels_for(Backend::Avx2), std::invalid_argument);
    }
    set_active_backend(before);
}
