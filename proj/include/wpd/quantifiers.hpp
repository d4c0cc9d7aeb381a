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

/**
 * @file
 * Shot-free duality quantities, all derived from the detector overlap matrix
 * O[j][k] = <0| U_k^dagger U_j |0>.
 *
 * The reduced particle state after the which-path stage is rho_p = O / N.
 * From it:
 *
 *   D   = sqrt(1 - sum_{j != k} |O_jk|^2 / (N (N - 1)))
 *   V_P = sqrt(N / (N - 1) * sum_{j != k} |rho_jk|^2)
 *   V_C = max_phi N / (N - 1) |p(0|phi) - 1/N|
 *       <= sum_{j != k} |rho_jk| / (N - 1)
 *
 * and D^2 + V_P^2 = 1, V_C <= V_P.
 */
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wpd/circuit.hpp"
#include "wpd/statevec.hpp"

namespace wpd {

inline constexpr double kRadicandTol = 1e-10;
inline constexpr double kRelationTol = 1e-10;

class OverlapMatrix {
  public:
    /// Validates: unit diagonal, Hermitian, |O_jk| <= 1, O / N PSD.
    static OverlapMatrix from_entries(Eigen::MatrixXcd entries);

    unsigned size() const { return static_cast<unsigned>(entries_.rows()); }
    const Eigen::MatrixXcd &entries() const { return entries_; }
    cplx operator()(unsigned j, unsigned k) const { return entries_(j, k); }

    /// True when every imaginary part is below `tol`.
    bool is_real(double tol = 1e-10) const;

    /// Sum over j != k of |O_jk|^2.
    double off_diagonal_sq_sum() const;

  private:
    explicit OverlapMatrix(Eigen::MatrixXcd entries)
        : entries_(std::move(entries)) {}
    Eigen::MatrixXcd entries_;
};

OverlapMatrix overlap_matrix(std::span<const Eigen::MatrixXcd> unitaries);
OverlapMatrix overlap_matrix(const InterferometerSpec &spec);

double distinguishability(const OverlapMatrix &o);

/// rho_p = O / N over log2(N) qubits.
MixedState reduced_particle_state(const OverlapMatrix &o);

/// From the off-diagonal elements of rho_p.
double visibility_purity(const OverlapMatrix &o);
/// From tr(rho_p^2) - tr(rho_p,inc^2); equal to visibility_purity.
double visibility_purity_from_purities(const OverlapMatrix &o);

/// p_p(0|phi) = (1/N) sum_jk [rho_p]_jk exp(i (phi_j - phi_k)).
double output_probability(const OverlapMatrix &o,
                          std::span<const double> phases);

enum class OverlapMode { RealOverlaps, General };

struct CoherenceMaximizeOptions {
    bool enabled = true;
    unsigned restarts = 8;
    double tolerance = 1e-14;
    unsigned max_sweeps = 10000;
    std::uint64_t seed = 0;
};

struct CoherenceVisibility {
    /// Exact value (RealOverlaps) or the best value found (General).
    double value = 0.0;
    /// phi = 0 value; never above the true maximum.
    double lower = 0.0;
    /// l1-coherence bound; never below the true maximum.
    double upper = 0.0;
    bool exact = false;
    std::vector<double> best_phases;
};

/// RealOverlaps throws std::invalid_argument when O has imaginary parts.
CoherenceVisibility
visibility_coherence(const OverlapMatrix &o, OverlapMode mode,
                     const CoherenceMaximizeOptions &options = {});

enum class Method { Analytic, Estimated };

struct Quantity {
    double value = 0.0;
    double std_error = 0.0;
    Method method = Method::Analytic;
};

struct DualityReport {
    Quantity D;
    Quantity V_C;
    Quantity V_P;
    double residual_equality = 0.0;   ///< D^2 + V_P^2 - 1
    double residual_inequality = 0.0; ///< D^2 + V_C^2 - 1
    double V_C_lower = 0.0;
    double V_C_upper = 0.0;
};

/// Assembles D, V_C and V_P; throws ToleranceError when D^2 + V_P^2 misses 1
/// or V_C exceeds V_P by more than kRelationTol.
DualityReport duality_check(const OverlapMatrix &o);

/// D, V_C, V_P and residuals from arbitrary (e.g. estimated) values.
DualityReport make_report(Quantity D, Quantity V_C, Quantity V_P);

} // namespace wpd
