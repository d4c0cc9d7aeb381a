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

#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "support/oracles.hpp"
#include "wpd/circuit.hpp"

using namespace wpd;
using Catch::Approx;
namespace ref = wpd::testing;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> random_phases(unsigned N, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(0, 2 * kPi);
    std::vector<double> ph(N);
    for (auto &p : ph) {
        p = u(rng);
    }
    return ph;
}

void check_close(const std::vector<double> &a, const std::vector<double> &b,
                 double tol) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == Approx(b[i]).margin(tol));
    }
}

} // namespace

TEST_CASE("detector unitaries") {
    auto s2 = InterferometerSpec::rotation(2, kPi);
    CHECK(detector_unitary(0, s2).isApprox(Eigen::MatrixXcd::Identity(2, 2)));
    CHECK(std::abs(detector_unitary(1, s2)(0, 0)) < 1e-15);

    auto s4 = InterferometerSpec::rotation(4, kPi / 2);
    const auto u3 = detector_unitary(3, s4);
    CHECK(u3(0, 0).real() == Approx(0.5));
    const ref::Mat r = ref::ry(kPi / 2);
    CHECK((u3 - ref::kron_all({r, r})).norm() < 1e-14);
}

TEST_CASE("N=2 particle readout circuit structure") {
    auto spec = InterferometerSpec::rotation(2, 0.4);
    auto gates = build_circuit(spec, ParticleReadout{{0.0, 0.0}});
    REQUIRE(gates.size() == 3);
    CHECK(gates[0].tag() == GateTag::BeamSplitter);
    CHECK(gates[1].tag() == GateTag::WhichPath);
    CHECK(gates[2].tag() == GateTag::BeamSplitter);
    const auto *cr = std::get_if<ControlledGate>(&gates[1].op());
    REQUIRE(cr);
    CHECK(cr->control.qubit == 0);
    CHECK(cr->target == 1);

    BuildOptions keep;
    keep.drop_zero_phase = false;
    auto full = build_circuit(spec, ParticleReadout{{0.0, 0.0}}, keep);
    REQUIRE(full.size() == 4);
    CHECK(full[2].tag() == GateTag::PhaseShift);

    auto phased = build_circuit(spec, ParticleReadout{{0.0, 1.0}});
    CHECK(phased.size() == 4);
}

TEST_CASE("N=2 detector readout ends with the inverse rotation") {
    const double theta = 0.9;
    auto spec = InterferometerSpec::rotation(2, theta);
    auto gates = build_circuit(spec, DetectorReadout{1});
    REQUIRE(!gates.empty());
    const auto *last = std::get_if<SingleGate>(&gates.back().op());
    REQUIRE(last);
    CHECK(gates.back().tag() == GateTag::DetectorInverse);
    CHECK(last->target == 1);
    const Mat2 inv = rotation(-theta);
    CHECK(std::abs(last->matrix.m00 - inv.m00) < 1e-15);
    CHECK(std::abs(last->matrix.m10 - inv.m10) < 1e-15);
}

TEST_CASE("per-qubit rotation gate count is 2n H + n CR") {
    for (unsigned N = 2; N <= 256; N *= 2) {
        const unsigned n = static_cast<unsigned>(std::countr_zero(N));
        auto spec = InterferometerSpec::rotation(N, 0.3);
        auto gates = build_circuit(spec, particle_readout(spec));
        unsigned h = 0, cr = 0;
        for (const auto &g : gates) {
            h += g.tag() == GateTag::BeamSplitter;
            cr += g.tag() == GateTag::WhichPath;
        }
        CHECK(h == 2 * n);
        CHECK(cr == n);
        CHECK(gates.size() == 3 * n);
    }
}

TEST_CASE("explicit unitaries use one multi-controlled gate per path") {
    std::mt19937_64 rng(5);
    std::vector<Eigen::MatrixXcd> us{Eigen::MatrixXcd::Identity(4, 4)};
    for (int j = 1; j < 4; ++j) {
        us.push_back(ref::haar_unitary(4, rng));
    }
    auto spec = InterferometerSpec::explicit_unitaries(us);
    auto gates = build_circuit(spec, particle_readout(spec));
    unsigned wp = 0;
    for (const auto &g : gates) {
        if (g.tag() == GateTag::WhichPath) {
            ++wp;
            CHECK(std::holds_alternative<MultiControlledGate>(g.op()));
        }
    }
    CHECK(wp == 3);
}

TEST_CASE("spec validation") {
    auto s = InterferometerSpec::rotation(2, 0.1);
    s.num_paths = 3;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = InterferometerSpec::rotation(4, 0.1);
    s.phases = {0.0, 1.0};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    std::vector<Eigen::MatrixXcd> bad{Eigen::MatrixXcd::Identity(2, 2),
                                      Eigen::MatrixXcd::Ones(2, 2)};
    CHECK_THROWS_AS(InterferometerSpec::explicit_unitaries(bad),
                    std::invalid_argument);
    std::vector<Eigen::MatrixXcd> not_id{ref::ry(0.3), ref::ry(0.4)};
    CHECK_THROWS_AS(InterferometerSpec::explicit_unitaries(not_id),
                    std::invalid_argument);
}

TEST_CASE("ideal interferometer examples") {
    auto s = InterferometerSpec::rotation(2, 0.0);
    CHECK(run(s, ParticleReadout{{0.0, 0.0}})[0] == Approx(1.0));
    CHECK(run(s, ParticleReadout{{0.0, kPi}})[0] == Approx(0.0).margin(1e-15));

    auto s4 = InterferometerSpec::rotation(4, kPi / 2);
    const double c = std::cos(kPi / 4);
    CHECK(run(s4, ParticleReadout{{0, 0, 0, 0}})[0] ==
          Approx((4 + 8 * c + 4 * c * c) / 16).epsilon(1e-12));
}

TEST_CASE("particle readout matches the dense reference") {
    std::mt19937_64 rng(21);
    for (unsigned N : {2U, 4U, 8U}) {
        for (double theta : {0.0, 0.37, kPi / 2, 2.9}) {
            const auto ph = random_phases(N, rng);
            auto spec = InterferometerSpec::rotation(N, theta);
            const auto got = run(spec, ParticleReadout{ph});
            const auto want = ref::interferometer(N, theta, ph, 0,
                                                  1 / std::numbers::sqrt2, 1);
            INFO("N=" << N << " theta=" << theta);
            check_close(got, want, 1e-12);
        }
    }
}

TEST_CASE("noisy runs match the dense density-matrix reference") {
    std::mt19937_64 rng(22);
    struct P {
        double eps, T, gamma;
    };
    for (unsigned N : {2U, 4U, 8U}) {
        for (P p :
             {P{0.072, 0.767, 0.873}, P{0.2, 0.9, 1.3}, P{0.0, 0.8, 0.5}}) {
            const double theta = 1.1;
            auto spec = InterferometerSpec::rotation(N, theta);
            spec.noise = {p.eps, p.T, p.gamma};
            const auto ph = random_phases(N, rng);
            INFO("N=" << N << " eps=" << p.eps);
            check_close(run(spec, ParticleReadout{ph}),
                        ref::interferometer(N, theta, ph, p.eps, p.T, p.gamma),
                        1e-12);
            for (unsigned k : {0U, N - 1, N / 2}) {
                check_close(run(spec, DetectorReadout{k}),
                            ref::interferometer(N, theta, ph, p.eps, p.T,
                                                p.gamma, static_cast<int>(k)),
                            1e-12);
            }
        }
    }
}

TEST_CASE("N=16 runs match the dense reference") {
    std::mt19937_64 rng(23);
    auto spec = InterferometerSpec::rotation(16, 0.8);
    spec.noise = {0.1, 0.8, 0.9};
    const auto ph = random_phases(16, rng);
    check_close(run(spec, ParticleReadout{ph}),
                ref::interferometer(16, 0.8, ph, 0.1, 0.8, 0.9), 1e-12);
    check_close(run(spec, DetectorReadout{5}),
                ref::interferometer(16, 0.8, ph, 0.1, 0.8, 0.9, 5), 1e-12);
}

TEST_CASE("factorized, cached and whole-register runs agree") {
    std::mt19937_64 rng(24);
    for (double eps : {0.0, 0.15}) {
        auto spec = InterferometerSpec::rotation(8, 0.6);
        spec.noise.epsilon = eps;
        SimCache cache;
        for (int rep = 0; rep < 3; ++rep) {
            const auto ph =
                rep == 2 ? std::vector<double>(8, 0.0) : random_phases(8, rng);
            RunOptions whole;
            whole.factorize = false;
            RunOptions cached;
            cached.cache = &cache;
            const auto a = run(spec, ParticleReadout{ph}, whole);
            check_close(run(spec, ParticleReadout{ph}), a, 1e-13);
            check_close(run(spec, ParticleReadout{ph}, cached), a, 1e-13);
            check_close(run(spec, ParticleReadout{ph}, cached), a, 0.0);
            check_close(run(spec, DetectorReadout{3}, cached),
                        run(spec, DetectorReadout{3}, whole), 1e-13);
        }
        CHECK(cache.hits() > 0);
    }
}

TEST_CASE("explicit unitary readouts follow the overlap matrix") {
    std::mt19937_64 rng(25);
    const unsigned N = 4;
    std::vector<Eigen::MatrixXcd> us{Eigen::MatrixXcd::Identity(4, 4)};
    for (unsigned j = 1; j < N; ++j) {
        us.push_back(ref::haar_unitary(4, rng));
    }
    auto spec = InterferometerSpec::explicit_unitaries(us);
    const ref::Mat O = ref::overlaps_of(us);
    for (int rep = 0; rep < 5; ++rep) {
        const auto ph = random_phases(N, rng);
        CHECK(run(spec, ParticleReadout{ph})[0] ==
              Approx(ref::ref_p0(O, ph)).margin(1e-12));
    }
    for (unsigned k = 0; k < N; ++k) {
        // p_d(0|k) = (1/N) sum_j |<0|U_k^dag U_j|0>|^2
        double want = 0;
        for (unsigned j = 0; j < N; ++j) {
            want += std::norm(O(j, k)) / N;
        }
        CHECK(run(spec, DetectorReadout{k})[0] == Approx(want).margin(1e-12));
    }
}

TEST_CASE("state after which-path has the expected particle marginal") {
    auto spec = InterferometerSpec::rotation(2, kPi / 2);
    auto rho = state_after_which_path(spec);
    const std::vector<unsigned> keep{0};
    auto rp = partial_trace(rho, keep);
    CHECK(rp(0, 1).real() == Approx(std::cos(kPi / 4) / 2));
    CHECK(rp(0, 0).real() == Approx(0.5));
}
