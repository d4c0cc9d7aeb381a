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

#include "wpd/noise.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "wpd/optimize.hpp"
#include "wpd/parallel.hpp"

namespace wpd {
namespace {

double protocol_value(const InterferometerSpec &spec, Observable q,
                      const EstimatorOptions &options) {
    switch (q) {
    case Observable::VC:
        return estimate_VC(spec, 0, 0, options).value;
    case Observable::VP:
        return estimate_VP(spec, 0, 0, options).value;
    case Observable::D:
        return estimate_D(spec, 0, 0, options).value;
    case Observable::VF:
        return estimate_fringe_visibility(spec, 0, 0, options).value;
    }
    throw std::logic_error("protocol_value: unknown observable");
}

/// Observations grouped by quantity, so each objective evaluation runs one
/// model curve per quantity.
struct Groups {
    std::vector<Observable> quantities;
    std::vector<std::vector<double>> thetas;
    std::vector<std::vector<std::size_t>> index;
};

Groups group(std::span<const Observation> obs) {
    Groups g;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        auto it = std::find(g.quantities.begin(), g.quantities.end(),
                            obs[i].quantity);
        std::size_t slot = it - g.quantities.begin();
        if (it == g.quantities.end()) {
            g.quantities.push_back(obs[i].quantity);
            g.thetas.emplace_back();
            g.index.emplace_back();
        }
        g.thetas[slot].push_back(obs[i].theta);
        g.index[slot].push_back(i);
    }
    return g;
}

class FitProblem {
  public:
    FitProblem(std::span<const Observation> obs, unsigned num_paths,
               const FitOptions &opt)
        : obs_(obs), num_paths_(num_paths), opt_(opt), groups_(group(obs)) {
        for (std::size_t i = 0; i < 3; ++i) {
            if (opt.free[i]) {
                free_.push_back(i);
                lower_.push_back(opt.box.lower[i]);
                upper_.push_back(opt.box.upper[i]);
            }
        }
    }

    std::size_t dim() const { return free_.size(); }
    std::span<const double> lower() const { return lower_; }
    std::span<const double> upper() const { return upper_; }

    ParamArray full(std::span<const double> x) const {
        ParamArray a = to_array(opt_.initial_guess);
        for (std::size_t i = 0; i < free_.size(); ++i) {
            a[free_[i]] = std::clamp(x[i], lower_[i], upper_[i]);
        }
        return a;
    }

    std::vector<double> reduce(const ParamArray &a) const {
        std::vector<double> x;
        for (auto i : free_) {
            x.push_back(a[i]);
        }
        return x;
    }

    /// Weighted residuals (model - value) / sigma.
    std::vector<double> residuals(std::span<const double> x) const {
        const NoiseParams p = from_array(full(x));
        std::vector<double> r(obs_.size());
        SimCache cache; // block reuse within one parameter point only
        EstimatorOptions eo;
        eo.cache = &cache;
        for (std::size_t g = 0; g < groups_.quantities.size(); ++g) {
            const auto model = model_curves(num_paths_, groups_.thetas[g], p,
                                            groups_.quantities[g], eo);
            for (std::size_t j = 0; j < model.size(); ++j) {
                const auto &o = obs_[groups_.index[g][j]];
                const double w = opt_.uniform_weights ? 1.0 : o.sigma;
                r[groups_.index[g][j]] = (model[j] - o.value) / w;
            }
        }
        return r;
    }

    double chi2(std::span<const double> x) const {
        double s = 0.0;
        for (double v : residuals(x)) {
            s += v * v;
        }
        return s;
    }

  private:
    std::span<const Observation> obs_;
    unsigned num_paths_;
    const FitOptions &opt_;
    Groups groups_;
    std::vector<std::size_t> free_;
    std::vector<double> lower_;
    std::vector<double> upper_;
};

/// Parameter covariance: 2 H^-1 from the chi^2 Hessian, or (J^T J)^-1 from
/// the residual Jacobian when the Hessian is not positive definite.
std::optional<Eigen::MatrixXd> covariance(const FitProblem &prob,
                                          const std::vector<double> &x) {
    const Objective f = [&](std::span<const double> p) { return prob.chi2(p); };
    const Eigen::MatrixXd h =
        finite_difference_hessian(f, x, prob.lower(), prob.upper());
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    const auto d = static_cast<Eigen::Index>(x.size());
    if (llt.info() == Eigen::Success) {
        return Eigen::MatrixXd(2.0 *
                               llt.solve(Eigen::MatrixXd::Identity(d, d)));
    }
    const auto r0 = prob.residuals(x);
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(r0.size()), d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const double step =
            std::min(1e-6, 0.5 * std::max(x[i] - prob.lower()[i],
                                          prob.upper()[i] - x[i]));
        std::vector<double> xp = x;
        const bool forward = x[i] + step <= prob.upper()[i];
        xp[i] += forward ? step : -step;
        const auto rp = prob.residuals(xp);
        for (std::size_t k = 0; k < r0.size(); ++k) {
            jac(static_cast<Eigen::Index>(k), i) =
                (rp[k] - r0[k]) / (forward ? step : -step);
        }
    }
    Eigen::LLT<Eigen::MatrixXd> jtj(jac.transpose() * jac);
    if (jtj.info() != Eigen::Success) {
        return std::nullopt;
    }
    return Eigen::MatrixXd(jtj.solve(Eigen::MatrixXd::Identity(d, d)));
}

} // namespace

const char *observable_name(Observable q) {
    switch (q) {
    case Observable::VC:
        return "V_C";
    case Observable::VP:
        return "V_P";
    case Observable::D:
        return "D";
    case Observable::VF:
        return "V_F";
    }
    return "?";
}

Observable parse_observable(const std::string &name) {
    std::string key;
    for (char c : name) {
        if (c != '_') {
            key.push_back(
                static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        }
    }
    if (key == "VC") {
        return Observable::VC;
    }
    if (key == "VP") {
        return Observable::VP;
    }
    if (key == "D") {
        return Observable::D;
    }
    if (key == "VF") {
        return Observable::VF;
    }
    throw std::invalid_argument("unknown quantity '" + name +
                                "' (expected V_C, V_P, D or V_F)");
}

InterferometerSpec apply_noise_model(InterferometerSpec spec,
                                     const NoiseParams &params) {
    params.validate();
    spec.noise = params;
    spec.validate();
    return spec;
}

std::vector<double> model_curves(unsigned num_paths,
                                 std::span<const double> theta_grid,
                                 const NoiseParams &params, Observable q,
                                 const EstimatorOptions &options) {
    if (theta_grid.empty()) {
        throw std::invalid_argument("model_curves: empty theta grid");
    }
    std::vector<double> out;
    out.reserve(theta_grid.size());
    for (double theta : theta_grid) {
        const auto spec = apply_noise_model(
            InterferometerSpec::rotation(num_paths, theta), params);
        out.push_back(protocol_value(spec, q, options));
    }
    return out;
}

std::vector<Observation>
synthesize_observations(unsigned num_paths, std::span<const double> thetas,
                        std::span<const Observable> quantities,
                        const NoiseParams &params, std::uint64_t shots,
                        std::uint64_t seed) {
    std::vector<Observation> out;
    SimCache cache;
    EstimatorOptions eo;
    eo.cache = &cache;
    // Settings of one estimate use seed + setting index; give each
    // (quantity, theta) pair a disjoint block of 2^20 seeds.
    std::uint64_t block = 0;
    for (Observable q : quantities) {
        for (double theta : thetas) {
            const auto spec = apply_noise_model(
                InterferometerSpec::rotation(num_paths, theta), params);
            const std::uint64_t s = seed + (block++ << 20);
            EstimateResult e;
            switch (q) {
            case Observable::VC:
                e = estimate_VC(spec, shots, s, eo);
                break;
            case Observable::VP:
                e = estimate_VP(spec, shots, s, eo);
                break;
            case Observable::D:
                e = estimate_D(spec, shots, s, eo);
                break;
            case Observable::VF:
                e = estimate_fringe_visibility(spec, shots, s, eo);
                break;
            }
            const double sigma =
                shots == 0 ? 1.0 : std::max(e.std_error, kMinSigma);
            out.push_back({theta, q, e.value, sigma});
        }
    }
    return out;
}

ParamArray to_array(const NoiseParams &p) { return {p.epsilon, p.T, p.gamma}; }

NoiseParams from_array(const ParamArray &a) {
    NoiseParams p;
    p.epsilon = a[0];
    p.T = a[1];
    p.gamma = a[2];
    return p;
}

FitResult fit_noise_params(std::span<const Observation> observations,
                           unsigned num_paths, const FitOptions &options) {
    const auto n_free = static_cast<std::size_t>(
        std::count(options.free.begin(), options.free.end(), true));
    if (n_free == 0) {
        throw std::invalid_argument("fit_noise_params: every parameter is "
                                    "fixed");
    }
    if (observations.size() < n_free) {
        throw std::invalid_argument(
            "fit_noise_params: " + std::to_string(observations.size()) +
            " observations for " + std::to_string(n_free) + " free parameters");
    }
    for (const auto &o : observations) {
        if (!(o.sigma > 0.0) && !options.uniform_weights) {
            throw std::invalid_argument(
                "fit_noise_params: every sigma must be positive");
        }
    }
    if (options.multistarts < 1) {
        throw std::invalid_argument("fit_noise_params: need a start");
    }
    // Fixed parameters keep their initial value; it must be valid.
    options.initial_guess.validate();

    FitProblem prob(observations, num_paths, options);
    const Objective f = [&](std::span<const double> x) { return prob.chi2(x); };

    std::vector<std::vector<double>> starts;
    starts.push_back(prob.reduce(to_array(options.initial_guess)));
    std::mt19937_64 rng(options.seed);
    for (unsigned s = 1; s < options.multistarts; ++s) {
        std::vector<double> x(prob.dim());
        for (std::size_t i = 0; i < x.size(); ++i) {
            std::uniform_real_distribution<double> u(prob.lower()[i],
                                                     prob.upper()[i]);
            x[i] = u(rng);
        }
        starts.push_back(std::move(x));
    }

    std::vector<MinimizeResult> runs(starts.size());
    parallel_for(starts.size(), options.threads, [&](std::size_t s) {
        runs[s] = nelder_mead(f, starts[s], prob.lower(), prob.upper());
    });

    FitResult res;
    std::size_t best = 0;
    for (std::size_t s = 0; s < runs.size(); ++s) {
        res.evaluations += runs[s].evaluations;
        res.start_optima.push_back(prob.full(runs[s].x));
        res.start_values.push_back(runs[s].value);
        if (runs[s].value < runs[best].value) {
            best = s;
        }
    }
    const std::vector<double> &xb = runs[best].x;
    res.params = from_array(prob.full(xb));
    res.residual_sum = runs[best].value;
    for (std::size_t i = 0; i < 3; ++i) {
        res.fixed_mask[i] = !options.free[i];
    }

    // Converged: the best start finished, and every start that reached the
    // best value (at least two) agrees on the parameters.
    const double level = runs[best].value * (1.0 + 1e-6) + 1e-9;
    std::size_t reaching = 0;
    bool agree = true;
    for (std::size_t s = 0; s < runs.size(); ++s) {
        if (runs[s].value <= level) {
            ++reaching;
            for (std::size_t i = 0; i < xb.size(); ++i) {
                if (std::abs(runs[s].x[i] - xb[i]) > options.agreement_tol) {
                    agree = false;
                }
            }
        }
    }
    res.converged =
        runs[best].converged && agree && (reaching >= 2 || runs.size() == 1);

    if (auto cov = covariance(prob, xb)) {
        double scale = 1.0;
        if (options.uniform_weights) {
            const double dof =
                static_cast<double>(observations.size()) - xb.size();
            scale = dof > 0 ? res.residual_sum / dof : 0.0;
        }
        std::size_t k = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            if (options.free[i]) {
                const double v = (*cov)(k, k) * scale;
                res.std_errors[i] = std::sqrt(std::max(v, 0.0));
                ++k;
            }
        }
    }
    return res;
}

std::string format_uncertainty(double value, double std_error) {
    char buf[64];
    if (!(std_error > 0.0) || !std::isfinite(std_error)) {
        std::snprintf(buf, sizeof buf, "%.6g", value);
        return buf;
    }
    int decimals = -static_cast<int>(std::floor(std::log10(std_error)));
    long digits = std::lround(std_error * std::pow(10.0, decimals));
    if (digits >= 10) { // 0.0096 rounds up to 0.010
        --decimals;
        digits = std::lround(std_error * std::pow(10.0, decimals));
    }
    if (digits == 1) { // keep two digits, as in 0.854(13)
        ++decimals;
        digits = std::lround(std_error * std::pow(10.0, decimals));
    }
    if (decimals <= 0) {
        std::snprintf(buf, sizeof buf, "%.0f(%.0f)", value, std_error);
        return buf;
    }
    std::snprintf(buf, sizeof buf, "%.*f(%ld)", decimals, value, digits);
    return buf;
}

} // namespace wpd
