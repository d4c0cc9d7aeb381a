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

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "support/oracles.hpp"
#include "wpd/statevec.hpp"

using namespace wpd;
using Catch::Approx;

namespace {

const double kInvSqrt2 = 1 / std::numbers::sqrt2;

PureState random_pure(unsigned nq, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    std::vector<cplx> a(std::size_t{1} << nq);
    double norm = 0;
    for (auto &x : a) {
        x = {g(rng), g(rng)};
        norm += std::norm(x);
    }
    for (auto &x : a) {
        x /= std::sqrt(norm);
    }
    return PureState::from_amplitudes(std::move(a));
}

Eigen::VectorXcd as_vector(const PureState &s) {
    Eigen::VectorXcd v(s.dim());
    for (std::size_t i = 0; i < s.dim(); ++i) {
        v(i) = s.amplitudes()[i];
    }
    return v;
}

} // namespace

TEST_CASE("init_pure prepares |0...0>") {
    auto s1 = init_pure(1);
    CHECK(s1.amplitudes()[0] == cplx(1));
    CHECK(s1.amplitudes()[1] == cplx(0));
    auto s2 = init_pure(2);
    REQUIRE(s2.dim() == 4);
    CHECK(s2.amplitudes()[0] == cplx(1));
    CHECK(init_pure(4).norm_squared() == Approx(1.0));
    CHECK_THROWS_AS(init_pure(0), std::invalid_argument);
    CHECK_THROWS_AS(init_pure(17), std::invalid_argument);
}

TEST_CASE("init_mixed is a product of biased qubits") {
    const std::vector<double> e0{0.0};
    auto r = init_mixed(1, e0);
    CHECK(r(0, 0) == cplx(1));
    CHECK(r(1, 1) == cplx(0));
    const std::vector<double> half{0.5};
    CHECK(init_mixed(1, half)(1, 1).real() == Approx(0.5));
    const std::vector<double> e{0.1, 0.2};
    auto m = init_mixed(2, e);
    CHECK(m(0, 0).real() == Approx(0.72));
    // Qubit 0 (epsilon 0.1) is the low bit of the index.
    CHECK(m(1, 1).real() == Approx(0.08));
    CHECK(m(2, 2).real() == Approx(0.18));
    CHECK(m(3, 3).real() == Approx(0.02));
    CHECK(m.is_valid());
    const std::vector<double> bad{1.5}, neg{-0.1};
    CHECK_THROWS_AS(init_mixed(1, bad), std::invalid_argument);
    CHECK_THROWS_AS(init_mixed(1, neg), std::invalid_argument);
}

TEST_CASE("basic gates") {
    auto s = init_pure(1);
    apply_gate(s, GateOp::single(0, hadamard()));
    CHECK(s.amplitudes()[0].real() == Approx(kInvSqrt2));
    CHECK(s.amplitudes()[1].real() == Approx(kInvSqrt2));
    apply_gate(s, GateOp::diagonal_phase({0}, {0.0, std::numbers::pi}));
    CHECK(s.amplitudes()[1].real() == Approx(-kInvSqrt2));

    // |10> in (q1 q0) order means qubit 0 set.
    auto t = PureState::from_amplitudes({0, 1, 0, 0});
    apply_gate(t, GateOp::controlled({0, true}, 1, rotation(std::numbers::pi)));
    CHECK(std::abs(t.amplitudes()[1]) < 1e-15);
    CHECK(std::abs(t.amplitudes()[3]) == Approx(1.0));

    CHECK_THROWS_AS(GateOp::single(0, Mat2{1, 1, 0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(GateOp::controlled({1, true}, 1, hadamard()),
                    std::invalid_argument);
}

TEST_CASE("gates agree with dense Kronecker matrices") {
    using namespace wpd::testing;
    std::mt19937_64 rng(11);
    const unsigned nq = 4;
    for (int trial = 0; trial < 20; ++trial) {
        auto s = random_pure(nq, rng);
        Eigen::VectorXcd v = as_vector(s);
        const Mat u = haar_unitary(2, rng);
        const Mat2 m = to_mat2(u);
        const unsigned c = trial % nq;
        const unsigned t = (trial + 1 + trial / nq) % nq == c
                               ? (c + 1) % nq
                               : (trial + 1 + trial / nq) % nq;
        apply_gate(s, GateOp::controlled({c, true}, t, m));
        v = controlled(nq, c, t, u) * v;
        CHECK((as_vector(s) - v).norm() < 1e-12);

        apply_gate(s, GateOp::single(t, m));
        v = on_qubit(nq, t, u) * v;
        CHECK((as_vector(s) - v).norm() < 1e-12);
    }
}

TEST_CASE("multi-controlled gate with mixed polarities") {
    using namespace wpd::testing;
    std::mt19937_64 rng(12);
    const unsigned nq = 4;
    auto s = random_pure(nq, rng);
    Eigen::VectorXcd v = as_vector(s);
    const Mat u = haar_unitary(4, rng);
    apply_gate(s, GateOp::multi_controlled({{0, false}, {3, true}}, {1, 2}, u));
    // Controls: qubit 0 = 0 and qubit 3 = 1. Target index: q1 + 2 q2.
    Eigen::VectorXcd ref = v;
    for (std::size_t base = 0; base < 16; ++base) {
        if ((base & 1) != 0 || ((base >> 3) & 1) != 1 || (base & 0b0110)) {
            continue;
        }
        Eigen::VectorXcd sub(4);
        for (unsigned x = 0; x < 4; ++x) {
            sub(x) = v(base | ((x & 1) << 1) | ((x >> 1) << 2));
        }
        sub = u * sub;
        for (unsigned x = 0; x < 4; ++x) {
            ref(base | ((x & 1) << 1) | ((x >> 1) << 2)) = sub(x);
        }
    }
    CHECK((as_vector(s) - ref).norm() < 1e-12);
}

TEST_CASE("mixed backend matches U rho U^dagger") {
    using namespace wpd::testing;
    std::mt19937_64 rng(13);
    const unsigned nq = 3;
    const std::vector<double> eps{0.1, 0.25, 0.05};
    auto r = init_mixed(nq, eps);
    Mat rho = r.to_matrix();
    const Mat u = haar_unitary(2, rng);
    const std::vector<GateOp> gates{
        GateOp::single(0, hadamard()),
        GateOp::controlled({0, true}, 2, to_mat2(u)),
        GateOp::diagonal_phase({1, 2}, {0.0, 0.4, 1.1, -0.7})};
    apply_gates(r, std::span<const GateOp>(gates));
    Mat U = controlled(nq, 0, 2, u) * on_qubit(nq, 0, bs(kInvSqrt2));
    Mat D = Mat::Identity(8, 8);
    const double ph[4] = {0.0, 0.4, 1.1, -0.7};
    for (int x = 0; x < 8; ++x) {
        D(x, x) = std::polar(1.0, ph[(x >> 1) & 3]);
    }
    U = D * U;
    rho = U * rho * U.adjoint();
    CHECK((r.to_matrix() - rho).norm() < 1e-12);
    CHECK(r.is_valid());
}

TEST_CASE("partial trace") {
    auto p = MixedState::from_pure(init_pure(2));
    const std::vector<unsigned> keep0{0};
    auto r = partial_trace(p, keep0);
    CHECK(r(0, 0) == cplx(1));
    CHECK(std::abs(r(1, 1)) == 0.0);

    auto bell = PureState::from_amplitudes({kInvSqrt2, 0, 0, kInvSqrt2});
    auto b = MixedState::from_pure(bell);
    for (unsigned q : {0U, 1U}) {
        const std::vector<unsigned> keep{q};
        auto rb = partial_trace(b, keep);
        CHECK(rb(0, 0).real() == Approx(0.5));
        CHECK(rb(1, 1).real() == Approx(0.5));
        CHECK(std::abs(rb(0, 1)) < 1e-15);
    }
}

TEST_CASE("partial trace keep order permutes qubits") {
    std::mt19937_64 rng(14);
    auto s = random_pure(3, rng);
    auto m = MixedState::from_pure(s);
    const std::vector<unsigned> k12{1, 2}, k21{2, 1};
    auto a = partial_trace(m, k12);
    auto b = partial_trace(m, k21);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            auto sw = [](std::size_t x) { return ((x & 1) << 1) | (x >> 1); };
            CHECK(std::abs(a(i, j) - b(sw(i), sw(j))) < 1e-15);
        }
    }
}

TEST_CASE("outcome probabilities") {
    auto s = init_pure(1);
    const std::vector<unsigned> reg{0};
    auto p = outcome_probabilities(s, reg);
    CHECK(p[0] == 1.0);
    CHECK(p[1] == 0.0);
    apply_gate(s, GateOp::single(0, hadamard()));
    p = outcome_probabilities(s, reg);
    CHECK(p[0] == Approx(0.5));
    CHECK(p[1] == Approx(0.5));

    std::mt19937_64 rng(15);
    auto r = random_pure(4, rng);
    const std::vector<unsigned> reg2{3, 1};
    auto pp = outcome_probabilities(r, reg2);
    auto pm = outcome_probabilities(MixedState::from_pure(r), reg2);
    double total = 0;
    for (std::size_t x = 0; x < 4; ++x) {
        double ref = 0;
        for (std::size_t i = 0; i < 16; ++i) {
            if ((((i >> 3) & 1) | (((i >> 1) & 1) << 1)) == x) {
                ref += std::norm(r.amplitudes()[i]);
            }
        }
        CHECK(pp[x] == Approx(ref).margin(1e-15));
        CHECK(pm[x] == Approx(ref).margin(1e-15));
        total += pp[x];
    }
    CHECK(total == Approx(1.0));
}

TEST_CASE("sample_counts") {
    const std::vector<double> det{1.0, 0.0};
    auto c = sample_counts(det, 8000, 3);
    CHECK(c[0] == 8000);
    CHECK(c[1] == 0);

    const std::vector<double> half{0.5, 0.5};
    CHECK(sample_counts(half, 8000, 9) == sample_counts(half, 8000, 9));

    int inside = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto k = sample_counts(half, 8000, seed);
        CHECK(k[0] + k[1] == 8000);
        inside += std::abs(k[0] / 8000.0 - 0.5) <= 0.02;
    }
    CHECK(inside >= 198);

    CHECK_THROWS_AS(sample_counts(std::vector<double>{0.5, 0.4}, 10, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(sample_counts(half, 0, 0), std::invalid_argument);
}

TEST_CASE("sample_counts follows the multinomial law") {
    const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
    const std::uint64_t shots = 1000;
    const int reps = 400;
    std::vector<double> total(p.size(), 0.0);
    double chi2 = 0;
    for (int r = 0; r < reps; ++r) {
        auto c = sample_counts(p, shots, 1000 + r);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double e = p[i] * shots;
            chi2 += (c[i] - e) * (c[i] - e) / e;
            total[i] += static_cast<double>(c[i]);
        }
    }
    // Sum of reps independent chi-square(3) statistics.
    boost::math::chi_squared dist(3.0 * reps);
    const double pvalue = boost::math::cdf(boost::math::complement(dist, chi2));
    CHECK(pvalue > 1e-3);
    CHECK(pvalue < 1 - 1e-3);
}

TEST_CASE("matrix helpers") {
    CHECK(unitarity_error(hadamard()) < 1e-15);
    const Mat2 r = rotation(0.7);
    CHECK(r.m00.real() == Approx(std::cos(0.35)));
    CHECK(r.m10.real() == Approx(std::sin(0.35)));
    CHECK(r.m01.real() == Approx(-std::sin(0.35)));
    const Mat2 a = adjoint(Mat2{{0, 1}, 2, 3, {4, -1}});
    CHECK(a.m01 == cplx(3));
    CHECK(a.m00 == cplx(0, -1));
}
