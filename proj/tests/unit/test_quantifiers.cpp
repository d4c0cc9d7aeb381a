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

#include <cmath>
#include <numbers>
#include <random>

#include "support/oracles.hpp"
#include "wpd/quantifiers.hpp"

using namespace wpd;
using Catch::Approx;
namespace ref = wpd::testing;

namespace {

constexpr double kPi = std::numbers::pi;

OverlapMatrix ones(unsigned N) {
    return OverlapMatrix::from_entries(Eigen::MatrixXcd::Ones(N, N));
}

OverlapMatrix identity(unsigned N) {
    return OverlapMatrix::from_entries(Eigen::MatrixXcd::Identity(N, N));
}

std::vector<Eigen::MatrixXcd> haar_family(unsigned N, unsigned m,
                                          std::mt19937_64 &rng) {
    std::vector<Eigen::MatrixXcd> us{
        Eigen::MatrixXcd::Identity(1 << m, 1 << m)};
    for (unsigned j = 1; j < N; ++j) {
        us.push_back(ref::haar_unitary(1 << m, rng));
    }
    return us;
}

} // namespace

TEST_CASE("overlap matrix examples") {
    std::vector<Eigen::MatrixXcd> id(4, Eigen::MatrixXcd::Identity(4, 4));
    CHECK(overlap_matrix(id).entries().isApprox(Eigen::MatrixXcd::Ones(4, 4)));

    const double theta = 1.3;
    auto o2 = overlap_matrix(InterferometerSpec::rotation(2, theta));
    CHECK(o2(0, 1).real() == Approx(std::cos(theta / 2)));

    auto o4 = overlap_matrix(InterferometerSpec::rotation(4, kPi / 2));
    for (unsigned j = 0; j < 4; ++j) {
        for (unsigned k = 0; k < 4; ++k) {
            const int d = std::popcount(j ^ k);
            CHECK(o4(j, k).real() ==
                  Approx(std::pow(1 / std::numbers::sqrt2, d)));
        }
    }
}

TEST_CASE("overlap matrix agrees with detector-state inner products") {
    for (unsigned N : {2U, 4U, 8U, 16U}) {
        for (double theta : {0.0, 0.7, 2.2, kPi}) {
            auto o = overlap_matrix(InterferometerSpec::rotation(N, theta));
            CHECK((o.entries() - ref::rotation_overlaps(N, theta)).norm() <
                  1e-12);
        }
    }
}

TEST_CASE("from_entries validation") {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Ones(2, 2);
    m(0, 0) = 0.9;
    CHECK_THROWS_AS(OverlapMatrix::from_entries(m), std::invalid_argument);
    m = Eigen::MatrixXcd::Identity(2, 2);
    m(0, 1) = 0.5;
    CHECK_THROWS_AS(OverlapMatrix::from_entries(m), std::invalid_argument);
    m(1, 0) = 0.5;
    CHECK_NOTHROW(OverlapMatrix::from_entries(m));
    // Unit diagonal and |O| <= 1 but not PSD.
    Eigen::MatrixXcd q = Eigen::MatrixXcd::Ones(3, 3);
    q(0, 1) = q(1, 0) = -1;
    CHECK_THROWS_AS(OverlapMatrix::from_entries(q), std::invalid_argument);
}

TEST_CASE("limits of D, V_P and V_C") {
    for (unsigned N : {2U, 4U, 8U}) {
        CHECK(distinguishability(ones(N)) == Approx(0.0).margin(1e-12));
        CHECK(distinguishability(identity(N)) == Approx(1.0));
        CHECK(visibility_purity(ones(N)) == Approx(1.0));
        CHECK(visibility_purity(identity(N)) == Approx(0.0).margin(1e-12));
        CHECK(visibility_coherence(ones(N), OverlapMode::RealOverlaps).value ==
              Approx(1.0));
        auto r1 = duality_check(ones(N));
        CHECK(r1.D.value == Approx(0.0).margin(1e-12));
        CHECK(r1.V_C.value == Approx(1.0));
        CHECK(r1.V_P.value == Approx(1.0));
        auto r0 = duality_check(identity(N));
        CHECK(r0.D.value == Approx(1.0));
        CHECK(r0.V_C.value == Approx(0.0).margin(1e-12));
        CHECK(r0.V_P.value == Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("N=4, theta=pi/2 reference values") {
    auto o = overlap_matrix(InterferometerSpec::rotation(4, kPi / 2));
    CHECK(distinguishability(o) == Approx(std::sqrt(7.0 / 12)).epsilon(1e-12));
    CHECK(visibility_purity(o) == Approx(std::sqrt(5.0 / 12)).epsilon(1e-12));
    const double vc = (8 / std::numbers::sqrt2 + 2) / 12;
    CHECK(visibility_coherence(o, OverlapMode::RealOverlaps).value ==
          Approx(vc).epsilon(1e-12));
    CHECK(vc < visibility_purity(o));
}

TEST_CASE("N=2: V_C equals V_P equals cos(theta/2)") {
    for (double theta : {0.0, 0.4, 1.5, 2.8, kPi}) {
        auto o = overlap_matrix(InterferometerSpec::rotation(2, theta));
        const double c = std::abs(std::cos(theta / 2));
        CHECK(visibility_purity(o) == Approx(c).margin(1e-12));
        CHECK(visibility_coherence(o, OverlapMode::RealOverlaps).value ==
              Approx(c).margin(1e-12));
        CHECK(distinguishability(o) ==
              Approx(std::abs(std::sin(theta / 2))).margin(1e-12));
    }
}

TEST_CASE("reduced particle state") {
    auto r = reduced_particle_state(ones(2));
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(r(i, j).real() == Approx(0.5));
        }
    }
    auto d = reduced_particle_state(identity(2));
    CHECK(std::abs(d(0, 1)) == 0.0);
    auto h = reduced_particle_state(
        overlap_matrix(InterferometerSpec::rotation(2, kPi / 2)));
    CHECK(h(0, 1).real() == Approx(0.35355339059327373));
    CHECK(h.is_valid());
}

TEST_CASE("reduced particle state equals the partial trace of the circuit "
          "state") {
    for (unsigned N : {2U, 4U, 8U}) {
        auto spec = InterferometerSpec::rotation(N, 1.2);
        auto full = state_after_which_path(spec);
        auto rp = partial_trace(full, spec.particle_register());
        auto from_o = reduced_particle_state(overlap_matrix(spec));
        CHECK((rp.to_matrix() - from_o.to_matrix()).norm() < 1e-12);
    }
}

TEST_CASE("Haar families: equality, hierarchy and bounds") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 60; ++trial) {
        const unsigned m = 1 + trial % 3;
        const unsigned N = 2u << (trial % 3);
        auto us = haar_family(N, m, rng);
        auto o = overlap_matrix(us);
        CHECK((o.entries() - ref::overlaps_of(us)).norm() < 1e-12);
        const double D = distinguishability(o);
        const double VP = visibility_purity(o);
        CHECK(D == Approx(ref::ref_D(o.entries())).margin(1e-12));
        CHECK(VP == Approx(ref::ref_VP(o.entries())).margin(1e-10));
        CHECK(VP == Approx(visibility_purity_from_purities(o)).margin(1e-10));
        CHECK(std::abs(D * D + VP * VP - 1) < 1e-10);
        auto vc = visibility_coherence(o, OverlapMode::General);
        CHECK(vc.lower <= vc.value + 1e-12);
        CHECK(vc.value <= vc.upper + 1e-12);
        CHECK(vc.value <= VP + 1e-10);
        CHECK(
            vc.value ==
            Approx(ref::ref_VC_at(o.entries(), vc.best_phases)).margin(1e-12));
        CHECK_NOTHROW(duality_check(o));
    }
}

TEST_CASE("General V_C on real overlaps reproduces the phi = 0 value") {
    for (double theta : {0.3, 1.9}) {
        auto o = overlap_matrix(InterferometerSpec::rotation(8, theta));
        auto exact = visibility_coherence(o, OverlapMode::RealOverlaps);
        auto general = visibility_coherence(o, OverlapMode::General);
        CHECK(exact.exact);
        CHECK(general.value == Approx(exact.value).margin(1e-10));
    }
}

TEST_CASE("RealOverlaps rejects complex overlaps") {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2);
    m(0, 1) = cplx(0, 0.5);
    m(1, 0) = cplx(0, -0.5);
    auto o = OverlapMatrix::from_entries(m);
    CHECK_FALSE(o.is_real());
    CHECK_THROWS_AS(visibility_coherence(o, OverlapMode::RealOverlaps),
                    std::invalid_argument);
    // A relative phase of pi/2 is recovered by the maximization.
    auto g = visibility_coherence(o, OverlapMode::General);
    CHECK(g.value == Approx(0.5).margin(1e-10));
    CHECK(g.lower == Approx(0.0).margin(1e-12));
}

TEST_CASE("output probability") {
    auto o = overlap_matrix(InterferometerSpec::rotation(2, 0.0));
    CHECK(output_probability(o, std::vector<double>{0, 0}) == Approx(1.0));
    CHECK(output_probability(o, std::vector<double>{0, kPi}) ==
          Approx(0.0).margin(1e-15));
    std::mt19937_64 rng(32);
    auto us = haar_family(4, 2, rng);
    auto oh = overlap_matrix(us);
    const std::vector<double> ph{0.1, 2.0, -1.0, 4.0};
    CHECK(output_probability(oh, ph) ==
          Approx(ref::ref_p0(oh.entries(), ph)).margin(1e-14));
}

TEST_CASE("make_report residuals") {
    auto r = make_report({0.6, 0.01, Method::Estimated},
                         {0.7, 0.01, Method::Estimated},
                         {0.8, 0.01, Method::Estimated});
    CHECK(r.residual_equality == Approx(0.0).margin(1e-12));
    CHECK(r.residual_inequality == Approx(0.36 + 0.49 - 1));
}
