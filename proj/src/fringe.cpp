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

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "wpd/estimator.hpp"

namespace wpd {

SineFit fit_sine(const FringeData &data) {
    const auto m = static_cast<Eigen::Index>(data.phi_grid.size());
    if (m < 3 || data.p0.size() != data.phi_grid.size()) {
        throw std::invalid_argument(
            "fit_sine: need at least 3 points with one rate per phase");
    }
    Eigen::MatrixXd x(m, 3);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        x(i, 0) = std::sin(data.phi_grid[i]);
        x(i, 1) = std::cos(data.phi_grid[i]);
        x(i, 2) = 1.0;
        y[i] = data.p0[i];
    }
    const Eigen::Matrix3d xtx = x.transpose() * x;
    Eigen::FullPivLU<Eigen::Matrix3d> lu(xtx);
    // Relative threshold: a grid confined to few distinct phases makes the
    // sine and cosine columns collinear.
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) {
        throw std::runtime_error(
            "fit_sine: singular normal equations (phase grid does not "
            "separate sin, cos and offset)");
    }
    const Eigen::Matrix3d inv = lu.inverse();
    const Eigen::Vector3d beta = inv * (x.transpose() * y);

    SineFit f;
    const double a1 = beta[0];
    const double a2 = beta[1];
    f.amplitude = std::hypot(a1, a2);
    f.offset = beta[2];
    // a sin(phi + delta) = a cos(delta) sin(phi) + a sin(delta) cos(phi).
    f.phase_shift = std::atan2(a2, a1);
    f.residual = (x * beta - y).squaredNorm();
    f.visibility = 2.0 * f.amplitude;

    if (data.shots > 0 && f.amplitude > 0.0) {
        // Sandwich covariance with binomial variances per grid point.
        Eigen::VectorXd w(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double p = data.p0[i];
            w[i] = p * (1.0 - p) / static_cast<double>(data.shots);
        }
        const Eigen::MatrixXd h = inv * x.transpose();
        const Eigen::Matrix3d cov = h * w.asDiagonal() * h.transpose();
        const Eigen::Vector2d grad(a1 / f.amplitude, a2 / f.amplitude);
        const double var_a =
            grad.transpose() * cov.topLeftCorner<2, 2>() * grad;
        f.visibility_std_error = 2.0 * std::sqrt(std::max(var_a, 0.0));
    }
    return f;
}

EstimateResult estimate_fringe_visibility(const InterferometerSpec &spec,
                                          std::uint64_t shots,
                                          std::uint64_t seed,
                                          const EstimatorOptions &options,
                                          unsigned points) {
    FringeData data =
        record_fringes(spec, default_phi_grid(points), shots, seed, options);
    const SineFit fit = fit_sine(data);
    EstimateResult e;
    e.value = fit.visibility;
    e.std_error = fit.visibility_std_error;
    e.shots_per_setting = shots;
    e.settings_used = data.phi_grid.size();
    e.p0 = std::move(data.p0);
    e.counts0 = std::move(data.counts0);
    return e;
}

} // namespace wpd
