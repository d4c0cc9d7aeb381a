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
 * Pure-state and density-matrix backends over a small qubit register.
 *
 * Basis convention: qubit 0 is the least-significant bit of a basis index.
 * A density matrix is stored row-major, which makes it a 2q-qubit vector
 * whose low q bits index the column and whose high q bits index the row.
 * U rho U^dagger is then U on the row qubits followed by conj(U) on the
 * column qubits, so both backends share the same kernels.
 */
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "wpd/kernels.hpp"

namespace wpd {

using cplx = std::complex<double>;
using kernels::Mat2;

inline constexpr unsigned kDefaultMaxQubits = 16;
/// Density matrices over q qubits hold 4^q entries.
inline constexpr unsigned kDefaultMaxMixedQubits = 10;

inline constexpr double kUnitarityTol = 1e-10;
inline constexpr double kNormTol = 1e-10;

/// Raised when a numerical invariant is breached at run time.
class ToleranceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class PureState {
  public:
    unsigned num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<const cplx> amplitudes() const { return amps_; }
    std::span<cplx> amplitudes() { return amps_; }
    double norm_squared() const;

    /// Takes ownership of `amps`; the size must be a power of two >= 2.
    static PureState from_amplitudes(std::vector<cplx> amps);

  private:
    friend PureState init_pure(unsigned, unsigned);
    PureState(unsigned num_qubits, std::vector<cplx> amps)
        : num_qubits_(num_qubits), amps_(std::move(amps)) {}

    unsigned num_qubits_;
    std::vector<cplx> amps_;
};

class MixedState {
  public:
    unsigned num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return std::size_t{1} << num_qubits_; }
    cplx operator()(std::size_t row, std::size_t col) const {
        return data_[row * dim() + col];
    }
    /// Row-major entries, dim() * dim() of them.
    std::span<const cplx> data() const { return data_; }
    std::span<cplx> data() { return data_; }

    cplx trace() const;
    Eigen::MatrixXcd to_matrix() const;

    /// Checks Hermiticity, unit trace and eigenvalues >= -psd_tol.
    bool is_valid(double tol = 1e-12, double psd_tol = 1e-10) const;

    static MixedState from_matrix(const Eigen::MatrixXcd &m);
    static MixedState from_pure(const PureState &psi);

  private:
    friend MixedState init_mixed(unsigned, std::span<const double>, unsigned);
    MixedState(unsigned num_qubits, std::vector<cplx> data)
        : num_qubits_(num_qubits), data_(std::move(data)) {}

    unsigned num_qubits_;
    std::vector<cplx> data_;
};

/// |0...0>. Throws std::invalid_argument outside [1, max_qubits].
PureState init_pure(unsigned num_qubits,
                    unsigned max_qubits = kDefaultMaxQubits);

/// Tensor product over qubits of (1 - eps_i)|0><0| + eps_i|1><1|.
/// A single-element `epsilon` applies to every qubit.
MixedState init_mixed(unsigned num_qubits, std::span<const double> epsilon,
                      unsigned max_qubits = kDefaultMaxMixedQubits);

// ---------------------------------------------------------------------------
// Gates

/// Role of a gate within an interferometer circuit; used for accounting.
enum class GateTag : std::uint8_t {
    Generic,
    BeamSplitter,
    WhichPath,
    PhaseShift,
    DetectorInverse,
};

struct Control {
    unsigned qubit;
    bool polarity; ///< true: active on |1>, false: active on |0>
    bool operator==(const Control &) const = default;
};

struct SingleGate {
    unsigned target;
    Mat2 matrix;
};

struct ControlledGate {
    Control control;
    unsigned target;
    Mat2 matrix;
};

struct MultiControlledGate {
    std::vector<Control> controls;
    std::vector<unsigned>
        targets; ///< targets[0] is the LSB of the matrix index
    Eigen::MatrixXcd matrix;
};

/// Multiplies basis state |x> of `qubits` by exp(i phases[x]).
struct DiagonalPhaseGate {
    std::vector<unsigned> qubits;
    std::vector<double> phases;
};

class GateOp {
  public:
    using Variant = std::variant<SingleGate, ControlledGate,
                                 MultiControlledGate, DiagonalPhaseGate>;

    // Factories validate unitarity and index distinctness.
    static GateOp single(unsigned target, const Mat2 &m,
                         GateTag tag = GateTag::Generic);
    static GateOp controlled(Control control, unsigned target, const Mat2 &m,
                             GateTag tag = GateTag::Generic);
    static GateOp multi_controlled(std::vector<Control> controls,
                                   std::vector<unsigned> targets,
                                   Eigen::MatrixXcd m,
                                   GateTag tag = GateTag::Generic);
    static GateOp diagonal_phase(std::vector<unsigned> qubits,
                                 std::vector<double> phases,
                                 GateTag tag = GateTag::PhaseShift);

    const Variant &op() const { return op_; }
    GateTag tag() const { return tag_; }

    /// Every qubit the gate touches (controls included), ascending.
    std::vector<unsigned> support() const;

    /// Same gate with each qubit q replaced by map[q].
    GateOp remapped(std::span<const unsigned> map) const;

  private:
    GateOp(Variant op, GateTag tag) : op_(std::move(op)), tag_(tag) {}

    Variant op_;
    GateTag tag_;
};

void apply_gate(PureState &state, const GateOp &gate);
void apply_gate(MixedState &state, const GateOp &gate);

template <class State>
void apply_gates(State &state, std::span<const GateOp> gates) {
    for (const GateOp &g : gates) {
        apply_gate(state, g);
    }
}

/// Reduced state on `keep`; keep[b] becomes qubit b of the result.
MixedState partial_trace(const MixedState &state,
                         std::span<const unsigned> keep);

/// Born-rule marginal over `reg`; reg[b] is bit b of the outcome index.
std::vector<double> outcome_probabilities(const PureState &state,
                                          std::span<const unsigned> reg);
std::vector<double> outcome_probabilities(const MixedState &state,
                                          std::span<const unsigned> reg);

/// Seeded multinomial draw of `shots` outcomes.
std::vector<std::uint64_t> sample_counts(std::span<const double> probabilities,
                                         std::uint64_t shots,
                                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// Matrix helpers

double unitarity_error(const Eigen::MatrixXcd &u);
double unitarity_error(const Mat2 &u);
Mat2 to_mat2(const Eigen::Matrix2cd &m);
Mat2 conj(const Mat2 &m);
Mat2 adjoint(const Mat2 &m);

/// Real rotation exp(-i theta Y / 2): |0> -> cos(theta/2)|0> + sin(theta/2)|1>.
Mat2 rotation(double theta);
Mat2 hadamard();

} // namespace wpd
