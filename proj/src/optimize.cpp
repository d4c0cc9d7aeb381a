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

#include "wpd/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wpd {
namespace {

using Point = std::vector<double>;

class BoxedObjective {
  public:
    BoxedObjective(const Objective &f, std::span<const double> lower,
                   std::span<const double> upper)
        : f_(f), lower_(lower), upper_(upper) {}

    void project(Point &x) const {
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = std::clamp(x[i], lower_[i], upper_[i]);
        }
    }
    double operator()(Point &x) {
        project(x);
        ++evals;
        return f_(x);
    }
    double width(std::size_t i) const { return upper_[i] - lower_[i]; }

    unsigned evals = 0;

  private:
    const Objective &f_;
    std::span<const double> lower_;
    std::span<const double> upper_;
};

Point affine(const Point &a, const Point &b, double t) {
    // a + t (b - a)
    Point out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] + t * (b[i] - a[i]);
    }
    return out;
}

struct Simplex {
    std::vector<Point> x;
    std::vector<double> f;

    void sort() {
        std::vector<std::size_t> idx(x.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(
            idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        std::vector<Point> xs;
        std::vector<double> fs;
        for (auto i : idx) {
            xs.push_back(std::move(x[i]));
            fs.push_back(f[i]);
        }
        x = std::move(xs);
        f = std::move(fs);
    }

    double diameter() const {
        double d = 0.0;
        for (std::size_t v = 1; v < x.size(); ++v) {
            for (std::size_t i = 0; i < x[v].size(); ++i) {
                d = std::max(d, std::abs(x[v][i] - x[0][i]));
            }
        }
        return d;
    }
};

Simplex make_simplex(BoxedObjective &obj, const Point &center, double step) {
    Simplex s;
    Point c = center;
    s.f.push_back(obj(c));
    s.x.push_back(c);
    for (std::size_t i = 0; i < center.size(); ++i) {
        Point v = c;
        const double h = step * obj.width(i);
        v[i] += h;
        Point probe = v;
        obj.project(probe);
        if (probe[i] == c[i]) {
            v[i] = c[i] - h; // sitting on the upper face
        }
        s.f.push_back(obj(v));
        s.x.push_back(v);
    }
    return s;
}

} // namespace

MinimizeResult nelder_mead(const Objective &f, std::vector<double> x0,
                           std::span<const double> lower,
                           std::span<const double> upper,
                           const NelderMeadOptions &opt) {
    const std::size_t dim = x0.size();
    if (dim == 0 || lower.size() != dim || upper.size() != dim) {
        throw std::invalid_argument("nelder_mead: dimension mismatch");
    }
    for (std::size_t i = 0; i < dim; ++i) {
        if (!(lower[i] < upper[i])) {
            throw std::invalid_argument("nelder_mead: empty box");
        }
    }
    BoxedObjective obj(f, lower, upper);

    // Standard coefficients.
    constexpr double kReflect = 1.0;
    constexpr double kExpand = 2.0;
    constexpr double kContract = 0.5;
    constexpr double kShrink = 0.5;

    MinimizeResult best;
    obj.project(x0);
    best.x = x0;
    best.value = obj(best.x);
    double step = opt.initial_step;

    for (unsigned round = 0; round <= opt.restarts; ++round) {
        Simplex s = make_simplex(obj, best.x, step);
        bool converged = false;
        while (obj.evals < opt.max_evals) {
            s.sort();
            if (s.f.back() - s.f.front() <=
                    opt.ftol * (1.0 + std::abs(s.f.front())) &&
                s.diameter() <= opt.xtol) {
                converged = true;
                break;
            }
            Point centroid(dim, 0.0);
            for (std::size_t v = 0; v < dim; ++v) {
                for (std::size_t i = 0; i < dim; ++i) {
                    centroid[i] += s.x[v][i] / static_cast<double>(dim);
                }
            }
            Point xr = affine(centroid, s.x[dim], -kReflect);
            const double fr = obj(xr);
            if (fr < s.f[0]) {
                Point xe = affine(centroid, s.x[dim], -kExpand);
                const double fe = obj(xe);
                if (fe < fr) {
                    s.x[dim] = std::move(xe);
                    s.f[dim] = fe;
                } else {
                    s.x[dim] = std::move(xr);
                    s.f[dim] = fr;
                }
                continue;
            }
            if (fr < s.f[dim - 1]) {
                s.x[dim] = std::move(xr);
                s.f[dim] = fr;
                continue;
            }
            const bool outside = fr < s.f[dim];
            Point xc = outside ? affine(centroid, xr, kContract)
                               : affine(centroid, s.x[dim], kContract);
            const double fc = obj(xc);
            if (fc < (outside ? fr : s.f[dim])) {
                s.x[dim] = std::move(xc);
                s.f[dim] = fc;
                continue;
            }
            for (std::size_t v = 1; v <= dim; ++v) {
                s.x[v] = affine(s.x[0], s.x[v], kShrink);
                s.f[v] = obj(s.x[v]);
            }
        }
        s.sort();
        const bool improved = s.f[0] < best.value;
        if (improved || round == 0) {
            best.x = s.x[0];
            best.value = std::min(best.value, s.f[0]);
        }
        best.converged = converged;
        if (!converged || (!improved && round > 0)) {
            break;
        }
        step = std::max(step * 0.1, 1e-6);
    }
    best.evaluations = obj.evals;
    return best;
}

Eigen::MatrixXd finite_difference_hessian(const Objective &f,
                                          std::span<const double> x,
                                          std::span<const double> lower,
                                          std::span<const double> upper,
                                          double step) {
    const std::size_t dim = x.size();
    std::vector<double> h(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const double room = std::min(x[i] - lower[i], upper[i] - x[i]);
        h[i] = step * std::max(1.0, std::abs(x[i]));
        if (room > 0.0) {
            h[i] = std::min(h[i], room);
        }
    }
    std::vector<double> p(x.begin(), x.end());
    auto eval = [&](std::size_t i, double di, std::size_t j, double dj) {
        p.assign(x.begin(), x.end());
        p[i] += di;
        p[j] += dj;
        return f(p);
    };
    const double f0 = f(std::vector<double>(x.begin(), x.end()));
    Eigen::MatrixXd hess(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const double fp = eval(i, h[i], i, 0.0);
        const double fm = eval(i, -h[i], i, 0.0);
        hess(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for (std::size_t j = 0; j < i; ++j) {
            const double fpp = eval(i, h[i], j, h[j]);
            const double fpm = eval(i, h[i], j, -h[j]);
            const double fmp = eval(i, -h[i], j, h[j]);
            const double fmm = eval(i, -h[i], j, -h[j]);
            hess(i, j) = hess(j, i) =
                (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
        }
    }
    return hess;
}

} // namespace wpd
