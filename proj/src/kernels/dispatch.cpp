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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels/scalar.hpp"

namespace wpd::kernels {
namespace {

constexpr KernelTable kScalarTable{"scalar", &scalar::apply_1q,
                                   &scalar::apply_diagonal, &scalar::abs2,
                                   &scalar::norm2};

#if defined(WPD_HAVE_AVX2_TU)
constexpr KernelTable kAvx2Table{"avx2", &avx2::apply_1q, &avx2::apply_diagonal,
                                 &avx2::abs2, &avx2::norm2};

bool cpu_has_avx2() {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable *initial_table() {
    Backend chosen =
        backend_available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
    if (const char *env = std::getenv("WPD_KERNELS")) {
        const std::string want(env);
        if (want == "scalar") {
            chosen = Backend::Scalar;
        } else if (want == "avx2" && backend_available(Backend::Avx2)) {
            chosen = Backend::Avx2;
        }
    }
    return &kernels_for(chosen);
}

std::atomic<const KernelTable *> &active_slot() {
    static std::atomic<const KernelTable *> slot{initial_table()};
    return slot;
}

} // namespace

const KernelTable &scalar_kernels() { return kScalarTable; }

bool backend_available(Backend backend) {
    switch (backend) {
    case Backend::Scalar:
        return true;
    case Backend::Avx2:
#if defined(WPD_HAVE_AVX2_TU)
        return cpu_has_avx2();
#else
        return false;
#endif
    }
    return false;
}

const KernelTable &kernels_for(Backend backend) {
    if (!backend_available(backend)) {
        throw std::invalid_argument("kernel backend '" +
                                    std::string(backend_name(backend)) +
                                    "' is not available on this CPU");
    }
#if defined(WPD_HAVE_AVX2_TU)
    if (backend == Backend::Avx2) {
        return kAvx2Table;
    }
#endif
    return kScalarTable;
}

const KernelTable &active_kernels() {
    return *active_slot().load(std::memory_order_acquire);
}

Backend active_backend() {
    return active_kernels().name == kScalarTable.name ? Backend::Scalar
                                                      : Backend::Avx2;
}

void set_active_backend(Backend backend) {
    active_slot().store(&kernels_for(backend), std::memory_order_release);
}

std::string_view backend_name(Backend backend) {
    return backend == Backend::Scalar ? "scalar" : "avx2";
}

} // namespace wpd::kernels
