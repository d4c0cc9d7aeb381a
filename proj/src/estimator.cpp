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

#include "wpd/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "wpd/parallel.hpp"

namespace wpd {
namespace {

struct ZeroOutcome {
    std::vector<double> p0;
    std::vector<std::uint64_t> counts0;
};

/// Probability of the all-zero outcome for settings 0..count-1.
template <class MakeVariant>
ZeroOutcome collect_p0(const InterferometerSpec &spec, std::size_t count,
                       MakeVariant &&make_variant, std::uint64_t shots,
                       std::uint64_t seed, const EstimatorOptions &options) {
    ZeroOutcome out;
    out.p0.assign(count, 0.0);
    if (shots > 0) {
        out.counts0.assign(count, 0);
    }
    parallel_chunks(
        count, options.threads, [&](std::size_t begin, std::size_t end) {
            SimCache local;
            RunOptions run_opts;
            run_opts.cache = (options.threads <= 1 && options.cache != nullptr)
                                 ? options.cache
                                 : &local;
            for (std::size_t i = begin; i < end; ++i) {
                const auto probs = run(spec, make_variant(i), run_opts);
                if (shots == 0) {
                    out.p0[i] = probs[0];
                    continue;
                }
                const auto counts = sample_counts(probs, shots, seed + i);
                out.counts0[i] = counts[0];
                out.p0[i] =
                    static_cast<double>(counts[0]) / static_cast<double>(shots);
            }
        });
    return out;
}

double binomial_var(double p, std::uint64_t shots) {
    return shots == 0 ? 0.0 : p * (1.0 - p) / static_cast<double>(shots);
}

/// sqrt of a radicand estimated with standard error `sigma`, clamped into
/// [0, 1]. Below sqrt(sigma) the first-order propagation sigma / (2 sqrt(r))
/// diverges; the spread of sqrt(r) is then about sqrt(sigma).
void finish_sqrt(EstimateResult &r, double radicand, double sigma) {
    if (radicand < 0.0) {
        radicand = 0.0;
        r.clamped = true;
    } else if (radicand > 1.0) {
        radicand = 1.0;
        r.clamped = true;
    }
    r.value = std::sqrt(radicand);
    if (sigma <= 0.0) {
        r.std_error = 0.0;
    } else if (r.value > std::sqrt(sigma)) {
        r.std_error = sigma / (2.0 * r.value);
    } else {
        r.std_error = std::sqrt(sigma);
    }
}

ParticleReadout binary_setting(unsigned num_paths, std::uint64_t mask) {
    ParticleReadout pr;
    pr.phases.assign(num_paths, 0.0);
    for (unsigned i = 0; i < num_paths; ++i) {
        if ((mask >> i) & 1U) {
            pr.phases[i] = std::numbers::pi;
        }
    }
    return pr;
}

} // namespace

EstimateResult estimate_D(const InterferometerSpec &spec, std::uint64_t shots,
                          std::uint64_t seed, const EstimatorOptions &options) {
    spec.validate();
    const unsigned n_paths = spec.num_paths;
    const double n = n_paths;
    auto z = collect_p0(
        spec, n_paths,
        [](std::size_t k) { return DetectorReadout{static_cast<unsigned>(k)}; },
        shots, seed, options);

    EstimateResult r;
    r.shots_per_setting = shots;
    r.settings_used = n_paths;
    double sum = 0.0;
    double var = 0.0;
    for (double p : z.p0) {
        sum += p;
        var += binomial_var(p, shots);
    }
    const double radicand = n / (n - 1.0) * (1.0 - sum / n);
    // d(D^2)/d p_k = -1 / (N - 1).
    finish_sqrt(r, radicand, std::sqrt(var) / (n - 1.0));
    r.p0 = std::move(z.p0);
    r.counts0 = std::move(z.counts0);
    return r;
}

EstimateResult estimate_VC(const InterferometerSpec &spec, std::uint64_t shots,
                           std::uint64_t seed,
                           const EstimatorOptions &options) {
    spec.validate();
    const unsigned n_paths = spec.num_paths;
    const double n = n_paths;
    auto z = collect_p0(
        spec, 1, [&](std::size_t) { return binary_setting(n_paths, 0); }, shots,
        seed, options);

    EstimateResult r;
    r.shots_per_setting = shots;
    r.settings_used = 1;
    const double p = z.p0[0];
    r.value = n / (n - 1.0) * std::abs(p - 1.0 / n);
    r.std_error = n / (n - 1.0) * std::sqrt(binomial_var(p, shots));
    r.p0 = std::move(z.p0);
    r.counts0 = std::move(z.counts0);
    return r;
}

EstimateResult estimate_VP(const InterferometerSpec &spec, std::uint64_t shots,
                           std::uint64_t seed,
                           const EstimatorOptions &options) {
    spec.validate();
    const unsigned n_paths = spec.num_paths;
    if (n_paths > options.vp_cap || n_paths > 62) {
        throw std::invalid_argument(
            "estimate_VP: N = " + std::to_string(n_paths) +
            " exceeds the enumeration cap " + std::to_string(options.vp_cap));
    }
    const double n = n_paths;
    const std::uint64_t settings = std::uint64_t{1} << n_paths;
    auto z = collect_p0(
        spec, settings,
        [&](std::size_t b) { return binary_setting(n_paths, b); }, shots, seed,
        options);

    EstimateResult r;
    r.shots_per_setting = shots;
    r.settings_used = settings;
    const double scale =
        n * n * n / (2.0 * static_cast<double>(settings) * (n - 1.0));
    double sum = 0.0;
    double var = 0.0;
    for (double p : z.p0) {
        const double d = p - 1.0 / n;
        sum += d * d;
        // d(V_P^2)/dp = 2 scale (p - 1/N).
        var += 4.0 * scale * scale * d * d * binomial_var(p, shots);
    }
    finish_sqrt(r, scale * sum, std::sqrt(var));
    r.p0 = std::move(z.p0);
    r.counts0 = std::move(z.counts0);
    return r;
}

double estimator_value(EstimatorKind kind, unsigned num_paths,
                       std::span<const double> p0) {
    const double n = num_paths;
    double sum = 0.0;
    switch (kind) {
    case EstimatorKind::D:
        for (double p : p0) {
            sum += p;
        }
        return std::sqrt(std::clamp(n / (n - 1.0) * (1.0 - sum / n), 0.0, 1.0));
    case EstimatorKind::VC:
        return n / (n - 1.0) * std::abs(p0[0] - 1.0 / n);
    case EstimatorKind::VP:
        for (double p : p0) {
            sum += (p - 1.0 / n) * (p - 1.0 / n);
        }
        return std::sqrt(std::clamp(
            n * n * n / (2.0 * static_cast<double>(p0.size()) * (n - 1.0)) *
                sum,
            0.0, 1.0));
    }
    throw std::logic_error("estimator_value: unknown kind");
}

double bootstrap_std_error(const EstimateResult &result, EstimatorKind kind,
                           unsigned num_paths, unsigned resamples,
                           std::uint64_t seed) {
    if (result.shots_per_setting == 0 || resamples < 2) {
        return 0.0;
    }
    std::mt19937_64 rng(seed);
    std::vector<double> p(result.p0.size());
    double mean = 0.0;
    double sq = 0.0;
    const double shots = static_cast<double>(result.shots_per_setting);
    for (unsigned b = 0; b < resamples; ++b) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            std::binomial_distribution<std::uint64_t> draw(
                result.shots_per_setting, std::clamp(result.p0[i], 0.0, 1.0));
            p[i] = static_cast<double>(draw(rng)) / shots;
        }
        const double v = estimator_value(kind, num_paths, p);
        mean += v;
        sq += v * v;
    }
    const double m = resamples;
    mean /= m;
    return std::sqrt(std::max(0.0, (sq / m - mean * mean) * m / (m - 1.0)));
}

double phase_average_oracle(const InterferometerSpec &spec,
                            std::uint64_t num_phase_samples, std::uint64_t seed,
                            const EstimatorOptions &options) {
    spec.validate();
    if (num_phase_samples < 1) {
        throw std::invalid_argument(
            "phase_average_oracle: need at least one phase sample");
    }
    const unsigned n_paths = spec.num_paths;
    const double n = n_paths;
    // One draw sequence regardless of threading.
    std::vector<double> phases(num_phase_samples * n_paths);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (double &p : phases) {
        p = angle(rng);
    }
    EstimatorOptions opts = options;
    opts.cache = nullptr;
    auto z = collect_p0(
        spec, num_phase_samples,
        [&](std::size_t s) {
            ParticleReadout pr;
            pr.phases.assign(phases.begin() + s * n_paths,
                             phases.begin() + (s + 1) * n_paths);
            return pr;
        },
        0, 0, opts);
    double mean = 0.0;
    for (double p : z.p0) {
        const double d = p - 1.0 / n;
        mean += d * d;
    }
    mean /= static_cast<double>(num_phase_samples);
    return std::sqrt(n * n * n / (n - 1.0) * mean);
}

std::vector<double> default_phi_grid(unsigned points) {
    std::vector<double> grid(points);
    for (unsigned i = 0; i < points; ++i) {
        grid[i] = 2.0 * std::numbers::pi * i / points;
    }
    return grid;
}

FringeData record_fringes(const InterferometerSpec &spec,
                          const std::vector<double> &phi_grid,
                          std::uint64_t shots, std::uint64_t seed,
                          const EstimatorOptions &options) {
    spec.validate();
    if (spec.num_paths != 2) {
        throw std::invalid_argument("record_fringes: fringes need N = 2");
    }
    if (phi_grid.size() < 8) {
        throw std::invalid_argument(
            "record_fringes: need at least 8 grid points");
    }
    auto z = collect_p0(
        spec, phi_grid.size(),
        [&](std::size_t i) { return ParticleReadout{{0.0, phi_grid[i]}}; },
        shots, seed, options);
    FringeData f;
    f.phi_grid = phi_grid;
    f.shots = shots;
    f.p0 = std::move(z.p0);
    if (shots > 0) {
        f.counts0 = std::move(z.counts0);
        for (auto c : f.counts0) {
            f.counts1.push_back(shots - c);
        }
    }
    return f;
}

} // namespace wpd
