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
#include <variant>

#include "wpd/circuit.hpp"
#include "wpd/estimator.hpp"
#include "wpd/noise.hpp"
#include "wpd/optimize.hpp"
#include "wpd/quantifiers.hpp"

using namespace wpd;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
const double kIdealT = 1 / std::numbers::sqrt2;

std::vector<double> grid(unsigned points, double stop_over_pi) {
    std::vector<double> t(points);
    for (unsigned i = 0; i < points; ++i) {
        t[i] = stop_over_pi * kPi * i / (points - 1);
    }
    return t;
}

} // namespace

TEST_CASE("ideal noise parameters leave runs unchanged") {
    auto spec = InterferometerSpec::rotation(4, 1.2);
    auto noisy = apply_noise_model(spec, {0.0, kIdealT, 1.0});
    const std::vector<double> ph{0.0, 0.5, 1.5, 3.0};
    const auto a = run(spec, ParticleReadout{ph});
    const auto b = run(noisy, ParticleReadout{ph});
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == Approx(b[i]).margin(1e-10));
    }
    CHECK_THROWS_AS(apply_noise_model(spec, {0.6, kIdealT, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_noise_model(spec, {0.1, 1.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_noise_model(spec, {0.1, kIdealT, 2.5}),
                    std::invalid_argument);
}

TEST_CASE("noise model examples") {
    for (double eps : {0.05, 0.1, 0.3}) {
        auto s = apply_noise_model(InterferometerSpec::rotation(2, 0.0),
                                   {eps, kIdealT, 1.0});
        CHECK(run(s, ParticleReadout{{0, 0}})[0] == Approx(1 - eps));
        CHECK(estimate_VC(s, 0, 0).value == Approx(1 - 2 * eps));
        CHECK(estimate_D(s, 0, 0).value > 0.0);
    }
    auto g = apply_noise_model(InterferometerSpec::rotation(2, kPi),
                               {0.0, kIdealT, 0.873});
    CHECK(estimate_D(g, 0, 0).value ==
          Approx(std::abs(std::sin(0.873 * kPi / 2))).epsilon(1e-12));
    CHECK(estimate_D(g, 0, 0).value == Approx(0.9801).margin(1e-4));
}

TEST_CASE("model curves") {
    const auto th = grid(7, 1.0);
    for (unsigned N : {2U, 4U, 8U}) {
        const auto vc =
            model_curves(N, th, NoiseParams::ideal(), Observable::VC);
        const auto vp =
            model_curves(N, th, NoiseParams::ideal(), Observable::VP);
        const auto d = model_curves(N, th, NoiseParams::ideal(), Observable::D);
        for (std::size_t i = 0; i < th.size(); ++i) {
            auto o = overlap_matrix(InterferometerSpec::rotation(N, th[i]));
            CHECK(
                vc[i] ==
                Approx(visibility_coherence(o, OverlapMode::RealOverlaps).value)
                    .margin(1e-10));
            CHECK(vp[i] == Approx(visibility_purity(o)).margin(1e-10));
            CHECK(d[i] == Approx(distinguishability(o)).margin(1e-10));
        }
    }
    const NoiseParams p{0.1, kIdealT, 1.0};
    for (unsigned N : {2U, 4U, 8U, 16U}) {
        const std::vector<double> zero{0.0};
        CHECK(model_curves(N, zero, p, Observable::VC)[0] < 1.0 - 1e-3);
        CHECK(model_curves(N, zero, p, Observable::D)[0] > 1e-3);
    }
    const std::vector<double> zero{0.0};
    CHECK(model_curves(2, zero, p, Observable::VC)[0] == Approx(0.8));
}

TEST_CASE("noise pushes the duality sum below one") {
    // Balanced splitters: only eps and gamma act.
    const auto th = grid(12, 1.0);
    for (double eps : {0.03, 0.072, 0.17}) {
        const NoiseParams p{eps, kIdealT, 0.873};
        for (unsigned N : {2U, 4U}) {
            const auto vp = model_curves(N, th, p, Observable::VP);
            const auto d = model_curves(N, th, p, Observable::D);
            for (std::size_t i = 0; i < th.size(); ++i) {
                CHECK(d[i] * d[i] + vp[i] * vp[i] < 1.0);
            }
        }
    }
}

TEST_CASE("two-path fringe visibility stays inside the unit circle") {
    const NoiseParams p{0.072, 0.767, 0.873};
    const auto th = grid(22, 1.1);
    const auto vf = model_curves(2, th, p, Observable::VF);
    const auto d = model_curves(2, th, p, Observable::D);
    for (std::size_t i = 0; i < th.size(); ++i) {
        CHECK(d[i] * d[i] + vf[i] * vf[i] < 1.0);
    }
}

TEST_CASE("imbalanced splitters bias the protocol visibilities") {
    // The protocols assume |beta|^2 = 1/N; with T != 1/sqrt2 the particle
    // port offset moves away from 1/N and V_P can exceed sqrt(1 - D^2).
    const NoiseParams p{0.0, 0.854, 1.0};
    const auto th = grid(12, 1.0);
    const auto vp = model_curves(4, th, p, Observable::VP);
    const auto d = model_curves(4, th, p, Observable::D);
    double worst = -1.0;
    for (std::size_t i = 0; i < th.size(); ++i) {
        worst = std::max(worst, d[i] * d[i] + vp[i] * vp[i] - 1.0);
    }
    CHECK(worst > 0.01);
}

TEST_CASE("fringe visibility matches cos(theta/2) without noise") {
    const auto th = grid(7, 1.0);
    const auto vf = model_curves(2, th, NoiseParams::ideal(), Observable::VF);
    for (std::size_t i = 0; i < th.size(); ++i) {
        CHECK(vf[i] == Approx(std::cos(th[i] / 2)).margin(1e-10));
    }
    CHECK_THROWS_AS(model_curves(4, th, NoiseParams::ideal(), Observable::VF),
                    std::invalid_argument);
}

TEST_CASE("beam splitter matrix is orthogonal and self-inverse") {
    for (double t : {kIdealT, 0.767, 0.854, 0.9, 0.999}) {
        const NoiseParams p{0.0, t, 1.0};
        const auto spec =
            apply_noise_model(InterferometerSpec::rotation(2, 0.3), p);
        const auto gates = build_circuit(spec, ParticleReadout{{0.0, 0.0}});
        const auto &m = std::get<SingleGate>(gates.front().op()).matrix;
        CHECK(gates.front().tag() == GateTag::BeamSplitter);
        // Real symmetric: M M^T = M^2.
        const double a = m.m00.real(), b = m.m01.real();
        const double c = m.m10.real(), d = m.m11.real();
        CHECK(std::abs(a * a + b * c - 1) < 1e-12);
        CHECK(std::abs(a * b + b * d) < 1e-12);
        CHECK(std::abs(c * a + d * c) < 1e-12);
        CHECK(std::abs(c * b + d * d - 1) < 1e-12);
        CHECK(std::abs(a * a + b * b - 1) < 1e-12);
        CHECK(std::abs(a * c + b * d) < 1e-12);
        CHECK(m.m00.imag() == 0.0);
        CHECK(m.m11.imag() == 0.0);
    }
}

TEST_CASE("initial-state mixing degrades V_C at theta = 0") {
    double prev = 2.0;
    for (double eps : {0.0, 0.05, 0.1, 0.2, 0.3, 0.4}) {
        const NoiseParams p{eps, kIdealT, 1.0};
        const double v =
            model_curves(2, std::vector<double>{0.0}, p, Observable::VC)
                .front();
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("random parameter triples are identified from exact data") {
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> ue(0.0, 0.5), ut(kIdealT, 0.999),
        ug(0.0, 2.0);
    const auto th = grid(12, 1.1);
    const std::vector<Observable> q{Observable::VC, Observable::D};
    for (int k = 0; k < 20; ++k) {
        const NoiseParams truth{ue(rng), ut(rng), ug(rng)};
        auto obs = synthesize_observations(2, th, q, truth, 0, 0);
        FitOptions fo;
        fo.seed = static_cast<std::uint64_t>(k);
        const auto fit = fit_noise_params(obs, 2, fo);
        INFO("truth " << truth.epsilon << " " << truth.T << " " << truth.gamma);
        CHECK(fit.params.epsilon == Approx(truth.epsilon).margin(1e-3));
        CHECK(fit.params.T == Approx(truth.T).margin(1e-3));
        CHECK(fit.params.gamma == Approx(truth.gamma).margin(1e-3));
    }
}

TEST_CASE("observable names") {
    for (Observable q :
         {Observable::VC, Observable::VP, Observable::D, Observable::VF}) {
        CHECK(parse_observable(observable_name(q)) == q);
    }
    CHECK_THROWS_AS(parse_observable("V"), std::invalid_argument);
}

TEST_CASE("synthetic observations") {
    const auto th = grid(5, 1.0);
    const std::vector<Observable> q{Observable::VC, Observable::D};
    const NoiseParams p{0.072, 0.767, 0.873};
    auto exact = synthesize_observations(2, th, q, p, 0, 0);
    REQUIRE(exact.size() == 10);
    for (const auto &o : exact) {
        CHECK(o.sigma == 1.0);
    }
    auto a = synthesize_observations(2, th, q, p, 8000, 3);
    auto b = synthesize_observations(2, th, q, p, 8000, 3);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].value == b[i].value);
        CHECK(a[i].sigma >= kMinSigma);
    }
}

TEST_CASE("Nelder-Mead on Rosenbrock") {
    const Objective f = [](std::span<const double> x) {
        return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
    };
    const std::vector<double> lo{-2, -2}, hi{2, 2};
    NelderMeadOptions o;
    o.max_evals = 20000;
    o.ftol = 1e-14;
    o.xtol = 1e-10;
    auto r = nelder_mead(f, {-1.2, 1.0}, lo, hi, o);
    CHECK(r.x[0] == Approx(1.0).margin(1e-4));
    CHECK(r.x[1] == Approx(1.0).margin(1e-4));
    CHECK(r.converged);
}

TEST_CASE("Nelder-Mead respects the box") {
    const Objective f = [](std::span<const double> x) {
        return (x[0] - 3) * (x[0] - 3) + (x[1] + 1) * (x[1] + 1);
    };
    const std::vector<double> lo{0, 0}, hi{1, 1};
    auto r = nelder_mead(f, {0.5, 0.5}, lo, hi);
    CHECK(r.x[0] == Approx(1.0).margin(1e-6));
    CHECK(r.x[1] == Approx(0.0).margin(1e-6));
}

TEST_CASE("finite-difference Hessian") {
    const Objective f = [](std::span<const double> x) {
        return 3 * x[0] * x[0] + 2 * x[0] * x[1] + 5 * x[1] * x[1];
    };
    const std::vector<double> x{0.2, -0.1}, lo{0, -1}, hi{1, 1};
    auto h = finite_difference_hessian(f, x, lo, hi);
    CHECK(h(0, 0) == Approx(6).epsilon(1e-6));
    CHECK(h(0, 1) == Approx(2).epsilon(1e-6));
    CHECK(h(1, 1) == Approx(10).epsilon(1e-6));
    // At a box face the steps shrink rather than leave the box.
    const std::vector<double> edge{0.0, 1.0};
    auto he = finite_difference_hessian(f, edge, lo, hi);
    CHECK(he(0, 0) == Approx(6).epsilon(1e-4));
}

TEST_CASE("exact round trip at N = 2") {
    const NoiseParams truth{0.072, 0.767, 0.873};
    const auto th = grid(22, 1.1);
    const std::vector<Observable> q{Observable::VC, Observable::D};
    auto obs = synthesize_observations(2, th, q, truth, 0, 0);
    FitOptions fo;
    fo.seed = 1;
    auto fit = fit_noise_params(obs, 2, fo);
    CHECK(fit.converged);
    CHECK(fit.params.epsilon == Approx(truth.epsilon).margin(1e-3));
    CHECK(fit.params.T == Approx(truth.T).margin(1e-3));
    CHECK(fit.params.gamma == Approx(truth.gamma).margin(1e-3));
    CHECK(fit.residual_sum < 1e-10);
    CHECK(fit.start_optima.size() == 8);
}

TEST_CASE("fixed parameters stay at the initial guess") {
    const NoiseParams truth{0.17, kIdealT, 0.86};
    const auto th = grid(11, 1.0);
    const std::vector<Observable> q{Observable::VC, Observable::D};
    auto obs = synthesize_observations(2, th, q, truth, 0, 0);
    FitOptions fo;
    fo.free = {true, false, true};
    fo.initial_guess = {0.1, kIdealT, 1.0};
    auto fit = fit_noise_params(obs, 2, fo);
    CHECK(fit.params.T == kIdealT);
    CHECK(fit.fixed_mask[1]);
    CHECK_FALSE(fit.std_errors[1].has_value());
    CHECK(fit.std_errors[0].has_value());
    CHECK(fit.params.epsilon == Approx(0.17).margin(1e-3));
    CHECK(fit.params.gamma == Approx(0.86).margin(1e-3));
}

TEST_CASE("sampled fit reports usable uncertainties") {
    const NoiseParams truth{0.072, 0.767, 0.873};
    const auto th = grid(22, 1.1);
    const std::vector<Observable> q{Observable::VC, Observable::D};
    auto obs = synthesize_observations(2, th, q, truth, 8000, 77);
    auto fit = fit_noise_params(obs, 2);
    CHECK(fit.converged);
    const ParamArray got = to_array(fit.params);
    const ParamArray want = to_array(truth);
    for (std::size_t k = 0; k < 3; ++k) {
        REQUIRE(fit.std_errors[k].has_value());
        CHECK(*fit.std_errors[k] > 0);
        CHECK(std::abs(got[k] - want[k]) < 5 * *fit.std_errors[k]);
    }
    FitOptions uw;
    uw.uniform_weights = true;
    auto fu = fit_noise_params(obs, 2, uw);
    CHECK(fu.std_errors[0].has_value());
}

TEST_CASE("fit argument errors") {
    const std::vector<Observation> one{{0.1, Observable::VC, 0.9, 0.01}};
    CHECK_THROWS_AS(fit_noise_params(one, 2), std::invalid_argument);
    FitOptions none;
    none.free = {false, false, false};
    const std::vector<Observation> obs(5, {0.1, Observable::VC, 0.9, 0.01});
    CHECK_THROWS_AS(fit_noise_params(obs, 2, none), std::invalid_argument);
    const std::vector<Observation> zero_sigma(5, {0.1, Observable::VC, 0.9, 0});
    CHECK_THROWS_AS(fit_noise_params(zero_sigma, 2), std::invalid_argument);
}

TEST_CASE("parentheses uncertainty notation") {
    CHECK(format_uncertainty(0.0724, 0.0031) == "0.072(3)");
    CHECK(format_uncertainty(0.8537, 0.0132) == "0.854(13)");
    CHECK(format_uncertainty(1.0213, 0.029) == "1.02(3)");
    CHECK(format_uncertainty(0.17, 0.0196) == "0.17(2)");
    CHECK(format_uncertainty(0.5, 0.0) == "0.5");
    CHECK(format_uncertainty(12.3, 2.4) == "12(2)");
}
