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

#include "wpd/cli/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "wpd/cli/svg.hpp"
#include "wpd/estimator.hpp"
#include "wpd/noise.hpp"
#include "wpd/parallel.hpp"
#include "wpd/quantifiers.hpp"

namespace wpd::cli {
namespace {

using ojson = nlohmann::ordered_json;

constexpr const char *kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};

/// Relation tolerance for exact probabilities; sampled data use
/// kSigmaTolerance combined standard errors on top of it.
constexpr double kExactTol = 1e-10;
constexpr double kSigmaTolerance = 5.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Seed of quantity q at sweep point t; estimates add their setting index,
/// so blocks are 2^24 apart (the largest enumeration vp_cap allows).
std::uint64_t point_seed(std::uint64_t base, std::size_t t, std::size_t q) {
    return base + ((static_cast<std::uint64_t>(t) * 4 + q) << 24);
}

InterferometerSpec make_spec(const ExperimentConfig &c, double theta) {
    return apply_noise_model(InterferometerSpec::rotation(c.N, theta), c.noise);
}

/// Closed forms apply when the detector stays in a pure state and the beam
/// splitters are balanced; gamma only rescales the angle.
bool analytic_applies(const NoiseParams &p) {
    return p.epsilon == 0.0 && p.T == NoiseParams::ideal().T;
}

EstimateResult estimate(const InterferometerSpec &spec, Observable q,
                        std::uint64_t shots, std::uint64_t seed,
                        const EstimatorOptions &eo) {
    switch (q) {
    case Observable::VC:
        return estimate_VC(spec, shots, seed, eo);
    case Observable::VP:
        return estimate_VP(spec, shots, seed, eo);
    case Observable::D:
        return estimate_D(spec, shots, seed, eo);
    case Observable::VF:
        return estimate_fringe_visibility(spec, shots, seed, eo);
    }
    throw std::logic_error("estimate: unknown observable");
}

ojson estimate_json(const EstimateResult &e) {
    ojson j;
    j["value"] = e.value;
    j["std_error"] = e.std_error;
    j["shots_per_setting"] = e.shots_per_setting;
    j["settings_used"] = e.settings_used;
    j["clamped"] = e.clamped;
    return j;
}

void raw_rows(std::ostringstream &csv, double theta, const char *quantity,
              const EstimateResult &e) {
    for (std::size_t s = 0; s < e.p0.size(); ++s) {
        csv << fmt(theta) << "," << quantity << "," << s << ",," << fmt(e.p0[s])
            << ","
            << (e.counts0.empty() ? std::string()
                                  : std::to_string(e.counts0[s]))
            << "," << e.shots_per_setting << "\n";
    }
}

constexpr const char *kRawHeader =
    "theta,quantity,setting,phi,p0,counts0,shots\n";

double slope(const std::vector<double> &x, const std::vector<double> &y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0 ? sxy / sxx : 0.0;
}

struct Relations {
    std::optional<double> equality;   ///< D^2 + V_P^2 - 1
    std::optional<double> inequality; ///< D^2 + V_C^2 - 1
    double tol_equality = kExactTol;
    double tol_order = kExactTol; ///< allowed V_C - V_P
};

Relations relations(const std::optional<EstimateResult> &d,
                    const std::optional<EstimateResult> &vc,
                    const std::optional<EstimateResult> &vp) {
    Relations r;
    if (d && vp) {
        r.equality = d->value * d->value + vp->value * vp->value - 1.0;
        r.tol_equality +=
            kSigmaTolerance * std::hypot(2 * d->value * d->std_error,
                                         2 * vp->value * vp->std_error);
    }
    if (d && vc) {
        r.inequality = d->value * d->value + vc->value * vc->value - 1.0;
    }
    if (vc && vp) {
        r.tol_order +=
            kSigmaTolerance * std::hypot(vc->std_error, vp->std_error);
    }
    return r;
}

void check_relations(const Relations &r,
                     const std::optional<EstimateResult> &vc,
                     const std::optional<EstimateResult> &vp, double theta,
                     std::vector<std::string> &violations) {
    if (r.equality && std::abs(*r.equality) > r.tol_equality) {
        violations.push_back("theta=" + fmt(theta) +
                             ": D^2 + V_P^2 - 1 = " + fmt(*r.equality) +
                             " exceeds tolerance " + fmt(r.tol_equality));
    }
    if (vc && vp && vc->value > vp->value + r.tol_order) {
        violations.push_back("theta=" + fmt(theta) +
                             ": V_C = " + fmt(vc->value) +
                             " exceeds V_P = " + fmt(vp->value));
    }
}

Panel duality_plane(const std::string &title) {
    Panel p;
    p.title = title;
    p.x_label = "D^2";
    p.y_label = "V^2";
    p.x_range = {-0.02, 1.05};
    p.y_range = {-0.02, 1.05};
    p.series.push_back(
        {"D^2 + V^2 = 1", {0.0, 1.0}, {1.0, 0.0}, {}, true, "#777", true});
    return p;
}

ojson base_results(const ExperimentConfig &c) {
    ojson j;
    j["schema"] = kResultsSchema;
    j["experiment"] = experiment_name(c.experiment);
    j["config"] = to_json(c);
    return j;
}

// ---------------------------------------------------------------------------

ExperimentOutput run_sweep(const ExperimentConfig &c, unsigned threads) {
    struct Point {
        std::vector<std::optional<EstimateResult>> est; // by quantity slot
        std::optional<DualityReport> analytic;
    };
    std::vector<Point> points(c.theta.size());
    parallel_for(c.theta.size(), threads, [&](std::size_t t) {
        const auto spec = make_spec(c, c.theta[t]);
        SimCache cache;
        EstimatorOptions eo;
        eo.cache = &cache;
        eo.vp_cap = c.vp_cap;
        auto &pt = points[t];
        pt.est.resize(4);
        for (std::size_t q = 0; q < c.quantities.size(); ++q) {
            const auto slot = static_cast<std::size_t>(c.quantities[q]);
            pt.est[slot] = estimate(spec, c.quantities[q], c.shots,
                                    point_seed(c.seed, t, slot), eo);
        }
        if (analytic_applies(c.noise)) {
            pt.analytic = duality_check(overlap_matrix(spec));
        }
    });

    ExperimentOutput out;
    out.results = base_results(c);
    std::ostringstream csv;
    csv << kRawHeader;
    auto &records = out.results["records"] = ojson::array();
    const auto VC = static_cast<std::size_t>(Observable::VC);
    const auto VP = static_cast<std::size_t>(Observable::VP);
    const auto D = static_cast<std::size_t>(Observable::D);
    const auto VF = static_cast<std::size_t>(Observable::VF);
    const bool expect = analytic_applies(c.noise);
    for (std::size_t t = 0; t < c.theta.size(); ++t) {
        const auto &pt = points[t];
        ojson r;
        r["N"] = c.N;
        r["theta"] = c.theta[t];
        for (std::size_t slot : {D, VC, VP, VF}) {
            if (pt.est[slot]) {
                const char *name =
                    observable_name(static_cast<Observable>(slot));
                r[name] = estimate_json(*pt.est[slot]);
                raw_rows(csv, c.theta[t], name, *pt.est[slot]);
            }
        }
        if (pt.analytic) {
            r["analytic"]["D"] = pt.analytic->D.value;
            r["analytic"]["V_C"] = pt.analytic->V_C.value;
            r["analytic"]["V_P"] = pt.analytic->V_P.value;
        }
        const Relations rel = relations(pt.est[D], pt.est[VC], pt.est[VP]);
        if (rel.equality) {
            r["residual_equality"] = *rel.equality;
        }
        if (rel.inequality) {
            r["residual_inequality"] = *rel.inequality;
        }
        r["expect_relations"] = expect;
        r["tolerance"] = rel.tol_equality;
        r["tolerance_order"] = rel.tol_order;
        if (expect) {
            check_relations(rel, pt.est[VC], pt.est[VP], c.theta[t],
                            out.violations);
        }
        records.push_back(std::move(r));
    }

    // Summary: least-squares slope of each quantity over theta.
    auto &summary = out.results["summary"];
    std::vector<double> slopes(4, 0.0);
    for (Observable q : c.quantities) {
        const auto slot = static_cast<std::size_t>(q);
        std::vector<double> y;
        for (const auto &pt : points) {
            y.push_back(pt.est[slot]->value);
        }
        slopes[slot] = slope(c.theta, y);
        summary["slopes"][observable_name(q)] = slopes[slot];
    }
    const bool has_d = points.front().est[D].has_value();
    bool complementary = has_d && c.theta.size() >= 2;
    bool any_v = false;
    for (std::size_t slot : {VC, VP, VF}) {
        if (points.front().est[slot]) {
            any_v = true;
            complementary = complementary && slopes[slot] * slopes[D] < 0;
        }
    }
    summary["complementary"] = complementary && any_v;

    // Plots
    Panel curves;
    curves.title = "N = " + std::to_string(c.N);
    curves.x_label = "theta / pi";
    curves.y_label = "value";
    curves.y_range = {-0.05, 1.08};
    Panel plane = duality_plane("N = " + std::to_string(c.N));
    std::size_t color = 0;
    for (Observable q : c.quantities) {
        const auto slot = static_cast<std::size_t>(q);
        Series s{observable_name(q), {}, {}, {}, false, kColors[color % 6]};
        Series a{std::string(observable_name(q)) + " analytic",
                 {},
                 {},
                 {},
                 true,
                 kColors[color % 6],
                 true};
        for (std::size_t t = 0; t < c.theta.size(); ++t) {
            s.x.push_back(c.theta[t] / std::numbers::pi);
            s.y.push_back(points[t].est[slot]->value);
            s.y_err.push_back(points[t].est[slot]->std_error);
            if (points[t].analytic && q != Observable::VF) {
                const auto &an = *points[t].analytic;
                a.x.push_back(c.theta[t] / std::numbers::pi);
                a.y.push_back(q == Observable::D    ? an.D.value
                              : q == Observable::VC ? an.V_C.value
                                                    : an.V_P.value);
            }
        }
        curves.series.push_back(std::move(s));
        if (!a.x.empty()) {
            curves.series.push_back(std::move(a));
        }
        if (q != Observable::D && has_d) {
            Series p{std::string(observable_name(q)) + " vs D",
                     {},
                     {},
                     {},
                     false,
                     kColors[color % 6]};
            for (const auto &pt : points) {
                p.x.push_back(pt.est[D]->value * pt.est[D]->value);
                p.y.push_back(pt.est[slot]->value * pt.est[slot]->value);
            }
            plane.series.push_back(std::move(p));
        }
        ++color;
    }
    out.plots.emplace_back("quantities_vs_theta.svg", render_svg({curves}));
    if (plane.series.size() > 1) {
        out.plots.emplace_back("duality_plane.svg", render_svg({plane}));
    }
    out.raw_csv = csv.str();
    return out;
}

ExperimentOutput run_fringes(const ExperimentConfig &c, unsigned threads) {
    struct Point {
        FringeData data;
        SineFit fit;
        EstimateResult d;
    };
    std::vector<Point> points(c.theta.size());
    parallel_for(c.theta.size(), threads, [&](std::size_t t) {
        const auto spec = make_spec(c, c.theta[t]);
        SimCache cache;
        EstimatorOptions eo;
        eo.cache = &cache;
        auto &pt = points[t];
        pt.data = record_fringes(spec, c.phases, c.shots,
                                 point_seed(c.seed, t, 0), eo);
        pt.fit = fit_sine(pt.data);
        pt.d = estimate_D(spec, c.shots, point_seed(c.seed, t, 2), eo);
    });

    ExperimentOutput out;
    out.results = base_results(c);
    std::ostringstream csv;
    csv << kRawHeader;
    auto &records = out.results["records"] = ojson::array();
    std::vector<Panel> panels;
    Panel curves;
    curves.title = "N = 2, fringe method";
    curves.x_label = "theta / pi";
    curves.y_label = "value";
    curves.y_range = {-0.05, 1.08};
    Series vs{"V (fringe fit)", {}, {}, {}, false, kColors[0]};
    Series ds{"D", {}, {}, {}, false, kColors[1]};
    Series va{"cos(gamma theta / 2)", {}, {}, {}, true, kColors[0], true};
    Panel plane = duality_plane("N = 2, fringe method");
    Series ps{"V vs D", {}, {}, {}, false, kColors[0]};
    for (std::size_t t = 0; t < c.theta.size(); ++t) {
        const auto &pt = points[t];
        const double theta = c.theta[t];
        ojson r;
        r["N"] = c.N;
        r["theta"] = theta;
        r["V_C"]["value"] = pt.fit.visibility;
        r["V_C"]["std_error"] = pt.fit.visibility_std_error;
        r["V_C"]["method"] = "fringe_fit";
        r["fringe_fit"]["amplitude"] = pt.fit.amplitude;
        r["fringe_fit"]["offset"] = pt.fit.offset;
        r["fringe_fit"]["phase_shift"] = pt.fit.phase_shift;
        r["fringe_fit"]["residual"] = pt.fit.residual;
        r["D"] = estimate_json(pt.d);
        if (analytic_applies(c.noise)) {
            r["analytic"]["V_C"] =
                std::abs(std::cos(c.noise.gamma * theta / 2));
            r["analytic"]["D"] = std::abs(std::sin(c.noise.gamma * theta / 2));
            va.x.push_back(theta / std::numbers::pi);
            va.y.push_back(r["analytic"]["V_C"].get<double>());
        }
        r["residual_inequality"] = pt.d.value * pt.d.value +
                                   pt.fit.visibility * pt.fit.visibility - 1.0;
        r["expect_relations"] = false;
        records.push_back(std::move(r));

        for (std::size_t i = 0; i < pt.data.phi_grid.size(); ++i) {
            csv << fmt(theta) << ",fringe," << i << ","
                << fmt(pt.data.phi_grid[i]) << "," << fmt(pt.data.p0[i]) << ","
                << (pt.data.counts0.empty()
                        ? std::string()
                        : std::to_string(pt.data.counts0[i]))
                << "," << pt.data.shots << "\n";
        }
        raw_rows(csv, theta, "D", pt.d);

        Panel fp;
        fp.title = "theta = " + fmt(theta / std::numbers::pi).substr(0, 6) +
                   " pi, V = " + fmt(pt.fit.visibility).substr(0, 6);
        fp.x_label = "phi / pi";
        fp.y_label = "p(0 | phi)";
        fp.y_range = {-0.02, 1.02};
        Series data{"counts", {}, {}, {}, false, kColors[0]};
        for (std::size_t i = 0; i < pt.data.phi_grid.size(); ++i) {
            data.x.push_back(pt.data.phi_grid[i] / std::numbers::pi);
            data.y.push_back(pt.data.p0[i]);
        }
        Series model{"sine fit", {}, {}, {}, true, kColors[1]};
        for (int i = 0; i <= 100; ++i) {
            const double phi = 2 * std::numbers::pi * i / 100;
            model.x.push_back(phi / std::numbers::pi);
            model.y.push_back(pt.fit.amplitude *
                                  std::sin(phi + pt.fit.phase_shift) +
                              pt.fit.offset);
        }
        fp.series = {std::move(data), std::move(model)};
        panels.push_back(std::move(fp));

        vs.x.push_back(theta / std::numbers::pi);
        vs.y.push_back(pt.fit.visibility);
        vs.y_err.push_back(pt.fit.visibility_std_error);
        ds.x.push_back(theta / std::numbers::pi);
        ds.y.push_back(pt.d.value);
        ds.y_err.push_back(pt.d.std_error);
        ps.x.push_back(pt.d.value * pt.d.value);
        ps.y.push_back(pt.fit.visibility * pt.fit.visibility);
    }
    curves.series = {vs, ds};
    if (!va.x.empty()) {
        curves.series.push_back(va);
    }
    plane.series.push_back(ps);
    out.plots.emplace_back("fringes.svg",
                           render_svg(panels, 4, "Particle-qubit fringes"));
    out.plots.emplace_back("visibility_vs_theta.svg", render_svg({curves}));
    out.plots.emplace_back("duality_plane.svg", render_svg({plane}));
    out.raw_csv = csv.str();
    return out;
}

ExperimentOutput run_estimate_vp(const ExperimentConfig &c, unsigned threads) {
    std::vector<EstimateResult> est(c.theta.size());
    std::vector<std::optional<double>> analytic(c.theta.size());
    parallel_for(c.theta.size(), threads, [&](std::size_t t) {
        const auto spec = make_spec(c, c.theta[t]);
        SimCache cache;
        EstimatorOptions eo;
        eo.cache = &cache;
        eo.vp_cap = c.vp_cap;
        est[t] = estimate_VP(spec, c.shots, point_seed(c.seed, t, 1), eo);
        if (analytic_applies(c.noise)) {
            analytic[t] = visibility_purity(overlap_matrix(spec));
        }
    });
    ExperimentOutput out;
    out.results = base_results(c);
    std::ostringstream csv;
    csv << kRawHeader;
    auto &records = out.results["records"] = ojson::array();
    Panel p;
    p.title = "V_P from 2^" + std::to_string(c.N) + " binary phase settings";
    p.x_label = "theta / pi";
    p.y_label = "V_P";
    p.y_range = {-0.05, 1.08};
    Series s{"estimate", {}, {}, {}, false, kColors[0]};
    Series a{"analytic", {}, {}, {}, true, kColors[1], true};
    for (std::size_t t = 0; t < c.theta.size(); ++t) {
        ojson r;
        r["N"] = c.N;
        r["theta"] = c.theta[t];
        r["V_P"] = estimate_json(est[t]);
        if (analytic[t]) {
            r["analytic"]["V_P"] = *analytic[t];
            a.x.push_back(c.theta[t] / std::numbers::pi);
            a.y.push_back(*analytic[t]);
        }
        r["expect_relations"] = false;
        records.push_back(std::move(r));
        raw_rows(csv, c.theta[t], "V_P", est[t]);
        s.x.push_back(c.theta[t] / std::numbers::pi);
        s.y.push_back(est[t].value);
        s.y_err.push_back(est[t].std_error);
    }
    out.results["summary"]["settings_per_point"] =
        est.empty() ? 0 : est.front().settings_used;
    p.series = {s};
    if (!a.x.empty()) {
        p.series.push_back(a);
    }
    out.plots.emplace_back("vp_vs_theta.svg", render_svg({p}));
    out.raw_csv = csv.str();
    return out;
}

ExperimentOutput run_fit(const ExperimentConfig &c, unsigned threads) {
    std::vector<Observation> obs;
    const bool synthetic = c.fit.observations.empty();
    if (synthetic) {
        obs = synthesize_observations(c.N, c.theta, c.quantities, c.noise,
                                      c.shots, c.seed);
    } else {
        obs = read_observations(c.fit.observations);
    }
    FitOptions fo;
    fo.free = c.fit.free;
    fo.initial_guess = c.fit.initial_guess;
    fo.multistarts = c.fit.multistarts;
    fo.seed = c.fit.seed;
    fo.uniform_weights = c.fit.uniform_weights;
    fo.threads = threads;
    const FitResult fit = fit_noise_params(obs, c.N, fo);

    ExperimentOutput out;
    out.results = base_results(c);
    auto &f = out.results["fit"];
    const ParamArray values = to_array(fit.params);
    const ParamArray truth = to_array(c.noise);
    constexpr const char *names[3] = {"epsilon", "T", "gamma"};
    for (std::size_t k = 0; k < 3; ++k) {
        auto &e = f["params"][names[k]];
        e["value"] = values[k];
        e["fixed"] = fit.fixed_mask[k];
        if (fit.std_errors[k]) {
            e["std_error"] = *fit.std_errors[k];
            e["formatted"] = format_uncertainty(values[k], *fit.std_errors[k]);
        } else {
            e["std_error"] = nullptr;
        }
        if (synthetic) {
            e["true"] = truth[k];
        }
    }
    f["residual_sum"] = fit.residual_sum;
    f["converged"] = fit.converged;
    f["evaluations"] = fit.evaluations;
    f["observations"] = obs.size();
    f["data"] = synthetic ? "synthetic" : c.fit.observations;

    std::ostringstream csv;
    csv << "theta,quantity,value,sigma,model\n";
    std::vector<Observable> kinds;
    for (const auto &o : obs) {
        if (std::find(kinds.begin(), kinds.end(), o.quantity) == kinds.end()) {
            kinds.push_back(o.quantity);
        }
    }
    double lo = obs.front().theta;
    double hi = lo;
    for (const auto &o : obs) {
        lo = std::min(lo, o.theta);
        hi = std::max(hi, o.theta);
    }
    std::vector<double> fine;
    for (int i = 0; i <= 100; ++i) {
        fine.push_back(lo + (hi - lo) * i / 100.0);
    }
    Panel p;
    p.title = "Fit, N = " + std::to_string(c.N);
    p.x_label = "theta / pi";
    p.y_label = "value";
    p.y_range = {-0.05, 1.08};
    auto &records = out.results["records"] = ojson::array();
    std::size_t color = 0;
    for (Observable q : kinds) {
        std::vector<double> th;
        std::vector<const Observation *> sel;
        for (const auto &o : obs) {
            if (o.quantity == q) {
                th.push_back(o.theta);
                sel.push_back(&o);
            }
        }
        const auto model = model_curves(c.N, th, fit.params, q);
        Series s{observable_name(q), {}, {}, {}, false, kColors[color % 6]};
        for (std::size_t i = 0; i < sel.size(); ++i) {
            csv << fmt(sel[i]->theta) << "," << observable_name(q) << ","
                << fmt(sel[i]->value) << "," << fmt(sel[i]->sigma) << ","
                << fmt(model[i]) << "\n";
            ojson r;
            r["N"] = c.N;
            r["theta"] = sel[i]->theta;
            r[observable_name(q)]["value"] = sel[i]->value;
            r[observable_name(q)]["std_error"] = sel[i]->sigma;
            r["model"] = model[i];
            r["expect_relations"] = false;
            records.push_back(std::move(r));
            s.x.push_back(sel[i]->theta / std::numbers::pi);
            s.y.push_back(sel[i]->value);
            s.y_err.push_back(synthetic && c.shots == 0 ? 0.0 : sel[i]->sigma);
        }
        Series m{std::string(observable_name(q)) + " model",
                 {},
                 {},
                 {},
                 true,
                 kColors[color % 6]};
        const auto curve = model_curves(c.N, fine, fit.params, q);
        for (std::size_t i = 0; i < fine.size(); ++i) {
            m.x.push_back(fine[i] / std::numbers::pi);
            m.y.push_back(curve[i]);
        }
        p.series.push_back(std::move(s));
        p.series.push_back(std::move(m));
        ++color;
    }
    out.plots.emplace_back("fit.svg", render_svg({p}));
    out.raw_csv = csv.str();
    return out;
}

ExperimentOutput run_oracle_check(const ExperimentConfig &c, unsigned threads) {
    struct Point {
        double oracle = 0.0;
        EstimateResult eq7;
        std::optional<double> closed;
    };
    std::vector<Point> points(c.theta.size());
    parallel_for(c.theta.size(), threads, [&](std::size_t t) {
        const auto spec = make_spec(c, c.theta[t]);
        SimCache cache;
        EstimatorOptions eo;
        eo.cache = &cache;
        eo.vp_cap = c.vp_cap;
        auto &pt = points[t];
        pt.oracle = phase_average_oracle(spec, c.oracle_samples,
                                         point_seed(c.seed, t, 3));
        pt.eq7 = estimate_VP(spec, 0, 0, eo);
        if (analytic_applies(c.noise)) {
            pt.closed = visibility_purity(overlap_matrix(spec));
        }
    });
    ExperimentOutput out;
    out.results = base_results(c);
    const double tol = 3.0 / std::sqrt(static_cast<double>(c.oracle_samples));
    out.results["summary"]["tolerance"] = tol;
    std::ostringstream csv;
    csv << kRawHeader;
    auto &records = out.results["records"] = ojson::array();
    Panel p;
    p.title = "Phase-average oracle, N = " + std::to_string(c.N);
    p.x_label = "theta / pi";
    p.y_label = "V_P";
    p.y_range = {-0.05, 1.08};
    Series so{"oracle", {}, {}, {}, false, kColors[0]};
    Series se{"binary settings", {}, {}, {}, false, kColors[1]};
    Series sc{"closed form", {}, {}, {}, true, kColors[2], true};
    for (std::size_t t = 0; t < c.theta.size(); ++t) {
        const auto &pt = points[t];
        ojson r;
        r["N"] = c.N;
        r["theta"] = c.theta[t];
        r["oracle"] = pt.oracle;
        r["V_P"] = estimate_json(pt.eq7);
        if (pt.closed) {
            r["analytic"]["V_P"] = *pt.closed;
            r["oracle_error"] = pt.oracle - *pt.closed;
            if (std::abs(pt.oracle - *pt.closed) > tol) {
                out.violations.push_back(
                    "theta=" + fmt(c.theta[t]) + ": oracle " + fmt(pt.oracle) +
                    " differs from closed form " + fmt(*pt.closed) +
                    " by more than " + fmt(tol));
            }
            sc.x.push_back(c.theta[t] / std::numbers::pi);
            sc.y.push_back(*pt.closed);
        }
        r["expect_relations"] = false;
        records.push_back(std::move(r));
        raw_rows(csv, c.theta[t], "V_P", pt.eq7);
        so.x.push_back(c.theta[t] / std::numbers::pi);
        so.y.push_back(pt.oracle);
        se.x.push_back(c.theta[t] / std::numbers::pi);
        se.y.push_back(pt.eq7.value);
    }
    p.series = {so, se};
    if (!sc.x.empty()) {
        p.series.push_back(sc);
    }
    out.plots.emplace_back("oracle_vs_theta.svg", render_svg({p}));
    out.raw_csv = csv.str();
    return out;
}

void write_file(const std::filesystem::path &path, const std::string &text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot write " + path.string());
    }
    f << text;
    if (!f) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

} // namespace

ExperimentOutput run_experiment(const ExperimentConfig &config,
                                unsigned threads) {
    validate(config);
    ExperimentOutput out;
    switch (config.experiment) {
    case Experiment::SweepTheta:
        out = run_sweep(config, threads);
        break;
    case Experiment::Fringes:
        out = run_fringes(config, threads);
        break;
    case Experiment::EstimateVP:
        out = run_estimate_vp(config, threads);
        break;
    case Experiment::Fit:
        out = run_fit(config, threads);
        break;
    case Experiment::OracleCheck:
        out = run_oracle_check(config, threads);
        break;
    }
    out.results["violations"] = out.violations;
    return out;
}

void write_outputs(const ExperimentOutput &output,
                   const std::filesystem::path &dir, bool plots) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw std::runtime_error("cannot create output directory " +
                                 dir.string() +
                                 (ec ? ": " + ec.message() : std::string()));
    }
    write_file(dir / "results.json", output.results.dump(2) + "\n");
    write_file(dir / "raw.csv", output.raw_csv);
    if (plots) {
        for (const auto &[name, svg] : output.plots) {
            write_file(dir / name, svg);
        }
    }
}

std::vector<Observation> read_observations(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open observations file " +
                                 path.string());
    }
    std::vector<Observation> out;
    std::string line;
    std::size_t lineno = 0;
    auto bad = [&](const std::string &why) {
        return std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                  ": " + why);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (lineno == 1 && line.rfind("theta", 0) == 0) {
            if (line != "theta,quantity,value,sigma") {
                throw bad("expected header theta,quantity,value,sigma");
            }
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) {
            cells.push_back(cell);
        }
        if (cells.size() != 4) {
            throw bad("expected 4 columns, got " +
                      std::to_string(cells.size()));
        }
        Observation o;
        try {
            std::size_t used = 0;
            o.theta = std::stod(cells[0], &used);
            o.quantity = parse_observable(cells[1]);
            o.value = std::stod(cells[2]);
            o.sigma = std::stod(cells[3]);
        } catch (const std::invalid_argument &e) {
            throw bad(e.what());
        } catch (const std::out_of_range &) {
            throw bad("number out of range");
        }
        out.push_back(o);
    }
    if (out.empty()) {
        throw std::runtime_error(path.string() + ": no observations");
    }
    return out;
}

} // namespace wpd::cli
