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

#include "wpd/quantifiers.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace wpd {
namespace {

double checked_sqrt(double radicand, const char *what) {
    if (radicand < -kRadicandTol) {
        throw std::invalid_argument(std::string(what) + ": negative radicand " +
                                    std::to_string(radicand));
    }
    return radicand < 0.0 ? 0.0 : std::sqrt(radicand);
}

/// S(phi) = sum_{j != k} rho_jk exp(i (phi_j - phi_k)); real for Hermitian
/// rho.
double coherence_sum(const Eigen::MatrixXcd &rho,
                     std::span<const double> phases) {
    const auto n = rho.rows();
    Eigen::VectorXcd x(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        x[j] = std::polar(1.0, -phases[j]);
    }
    // x^dagger rho x with the diagonal removed.
    const cplx full = x.dot(rho * x);
    return full.real() - rho.diagonal().real().sum();
}

struct AscentResult {
    double value;
    std::vector<double> phases;
};

// Coordinate ascent on |S(phi)|. With everything but phi_m fixed,
// S = C + 2 Re(exp(i phi_m) A_m), A_m = sum_{k != m} rho_mk exp(-i phi_k),
// so each coordinate has a closed-form optimum.
AscentResult coordinate_ascent(const Eigen::MatrixXcd &rho,
                               std::vector<double> phases,
                               const CoherenceMaximizeOptions &opt) {
    const auto n = rho.rows();
    double s = coherence_sum(rho, phases);
    for (unsigned sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        const double before = std::abs(s);
        for (Eigen::Index m = 1; m < n; ++m) {
            cplx a = 0.0;
            for (Eigen::Index k = 0; k < n; ++k) {
                if (k != m) {
                    a += rho(m, k) * std::polar(1.0, -phases[k]);
                }
            }
            const double c = s - 2.0 * (std::polar(1.0, phases[m]) * a).real();
            const double mod = std::abs(a);
            const double arg = std::arg(a);
            // Push S up when it is already non-negative, down otherwise.
            phases[m] = (c >= 0.0) ? -arg : std::numbers::pi - arg;
            s = c + ((c >= 0.0) ? 2.0 * mod : -2.0 * mod);
        }
        if (std::abs(s) - before <= opt.tolerance) {
            break;
        }
    }
    return {std::abs(s), std::move(phases)};
}

} // namespace

OverlapMatrix OverlapMatrix::from_entries(Eigen::MatrixXcd entries) {
    const auto n = entries.rows();
    if (n < 2 || entries.cols() != n) {
        throw std::invalid_argument(
            "OverlapMatrix: need a square matrix of size >= 2");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        if (std::abs(entries(j, j) - 1.0) > 1e-12) {
            throw std::invalid_argument(
                "OverlapMatrix: diagonal entries must be 1");
        }
        for (Eigen::Index k = 0; k < n; ++k) {
            if (std::abs(entries(k, j) - std::conj(entries(j, k))) > 1e-12) {
                throw std::invalid_argument(
                    "OverlapMatrix: matrix is not Hermitian");
            }
            if (std::abs(entries(j, k)) > 1.0 + 1e-12) {
                throw std::invalid_argument(
                    "OverlapMatrix: overlap modulus exceeds 1");
            }
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        entries / static_cast<double>(n), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
        throw std::invalid_argument(
            "OverlapMatrix: O / N is not positive semidefinite");
    }
    return OverlapMatrix(std::move(entries));
}

bool OverlapMatrix::is_real(double tol) const {
    return entries_.imag().cwiseAbs().maxCoeff() < tol;
}

double OverlapMatrix::off_diagonal_sq_sum() const {
    double s = 0.0;
    for (Eigen::Index j = 0; j < entries_.rows(); ++j) {
        for (Eigen::Index k = 0; k < entries_.cols(); ++k) {
            if (j != k) {
                s += std::norm(entries_(j, k));
            }
        }
    }
    return s;
}

OverlapMatrix overlap_matrix(std::span<const Eigen::MatrixXcd> unitaries) {
    const auto n = static_cast<Eigen::Index>(unitaries.size());
    if (n < 2) {
        throw std::invalid_argument("overlap_matrix: need at least two paths");
    }
    const auto dim = unitaries.front().rows();
    std::vector<Eigen::VectorXcd> states;
    for (const auto &u : unitaries) {
        if (u.rows() != dim || unitarity_error(u) >= kUnitarityTol) {
            throw std::invalid_argument(
                "overlap_matrix: detector operators must be unitaries of "
                "equal size");
        }
        states.emplace_back(u.col(0)); // U_j |0>
    }
    Eigen::MatrixXcd o(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            // <0| U_k^dagger U_j |0> = <psi_k | psi_j>
            o(j, k) = (j == k) ? cplx(1.0) : states[k].dot(states[j]);
        }
    }
    return OverlapMatrix::from_entries(std::move(o));
}

OverlapMatrix overlap_matrix(const InterferometerSpec &spec) {
    spec.validate();
    std::vector<Eigen::MatrixXcd> us;
    for (unsigned j = 0; j < spec.num_paths; ++j) {
        us.push_back(detector_unitary(j, spec));
    }
    return overlap_matrix(us);
}

double distinguishability(const OverlapMatrix &o) {
    const double n = o.size();
    return checked_sqrt(1.0 - o.off_diagonal_sq_sum() / (n * (n - 1.0)),
                        "distinguishability");
}

MixedState reduced_particle_state(const OverlapMatrix &o) {
    return MixedState::from_matrix(o.entries() / static_cast<double>(o.size()));
}

double visibility_purity(const OverlapMatrix &o) {
    const double n = o.size();
    const Eigen::MatrixXcd rho = o.entries() / n;
    double s = 0.0;
    for (Eigen::Index j = 0; j < rho.rows(); ++j) {
        for (Eigen::Index k = 0; k < rho.cols(); ++k) {
            if (j != k) {
                s += std::norm(rho(j, k));
            }
        }
    }
    return checked_sqrt(n / (n - 1.0) * s, "visibility_purity");
}

double visibility_purity_from_purities(const OverlapMatrix &o) {
    const double n = o.size();
    const Eigen::MatrixXcd rho = o.entries() / n;
    const double purity = (rho * rho).trace().real();
    const double purity_inc = rho.diagonal().cwiseAbs2().sum();
    return checked_sqrt(n / (n - 1.0) * (purity - purity_inc),
                        "visibility_purity_from_purities");
}

double output_probability(const OverlapMatrix &o,
                          std::span<const double> phases) {
    if (phases.size() != o.size()) {
        throw std::invalid_argument("output_probability: need one phase per "
                                    "path");
    }
    const double n = o.size();
    const Eigen::MatrixXcd rho = o.entries() / n;
    return (coherence_sum(rho, phases) + 1.0) / n;
}

CoherenceVisibility visibility_coherence(const OverlapMatrix &o,
                                         OverlapMode mode,
                                         const CoherenceMaximizeOptions &opt) {
    const double n = o.size();
    const Eigen::MatrixXcd rho = o.entries() / n;
    std::vector<double> zeros(o.size(), 0.0);

    CoherenceVisibility out;
    out.lower = std::abs(coherence_sum(rho, zeros)) / (n - 1.0);
    double l1 = 0.0;
    for (Eigen::Index j = 0; j < rho.rows(); ++j) {
        for (Eigen::Index k = 0; k < rho.cols(); ++k) {
            if (j != k) {
                l1 += std::abs(rho(j, k));
            }
        }
    }
    out.upper = l1 / (n - 1.0);
    out.best_phases = zeros;

    if (mode == OverlapMode::RealOverlaps) {
        if (!o.is_real()) {
            throw std::invalid_argument(
                "visibility_coherence: overlaps are not real");
        }
        // The phi = 0 bound saturates for real overlaps.
        out.value = out.lower;
        out.exact = true;
        return out;
    }

    out.value = out.lower;
    if (opt.enabled) {
        std::mt19937_64 rng(opt.seed);
        std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
        for (unsigned r = 0; r < opt.restarts; ++r) {
            std::vector<double> start(o.size(), 0.0);
            if (r > 0) {
                for (std::size_t m = 1; m < start.size(); ++m) {
                    start[m] = angle(rng);
                }
            }
            const auto res = coordinate_ascent(rho, std::move(start), opt);
            const double v = std::min(res.value / (n - 1.0), out.upper);
            if (v > out.value) {
                out.value = v;
                out.best_phases = res.phases;
            }
        }
    }
    out.exact = std::abs(out.upper - out.lower) < kRelationTol;
    return out;
}

DualityReport make_report(Quantity D, Quantity V_C, Quantity V_P) {
    DualityReport r;
    r.D = D;
    r.V_C = V_C;
    r.V_P = V_P;
    r.residual_equality = D.value * D.value + V_P.value * V_P.value - 1.0;
    r.residual_inequality = D.value * D.value + V_C.value * V_C.value - 1.0;
    r.V_C_lower = V_C.value;
    r.V_C_upper = V_C.value;
    return r;
}

DualityReport duality_check(const OverlapMatrix &o) {
    const auto vc = visibility_coherence(
        o, o.is_real() ? OverlapMode::RealOverlaps : OverlapMode::General);
    DualityReport r = make_report({distinguishability(o)}, {vc.value},
                                  {visibility_purity(o)});
    r.V_C_lower = vc.lower;
    r.V_C_upper = vc.upper;
    if (std::abs(r.residual_equality) > kRelationTol) {
        throw ToleranceError("duality_check: D^2 + V_P^2 - 1 = " +
                             std::to_string(r.residual_equality));
    }
    if (vc.upper > r.V_P.value + kRelationTol) {
        throw ToleranceError("duality_check: V_C bound " +
                             std::to_string(vc.upper) + " exceeds V_P " +
                             std::to_string(r.V_P.value));
    }
    return r;
}

} // namespace wpd
