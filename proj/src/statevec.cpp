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

#include "wpd/statevec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>
#include <type_traits>

#include "kernels/bits.hpp"

namespace wpd {
namespace {

template <class Msg> void require(bool ok, Msg &&what) {
    if (!ok) {
        if constexpr (std::is_invocable_v<Msg>) {
            throw std::invalid_argument(what());
        } else {
            throw std::invalid_argument(std::string(what));
        }
    }
}

void check_register(std::span<const unsigned> qubits, unsigned num_qubits,
                    const char *what) {
    std::uint64_t seen = 0;
    for (unsigned q : qubits) {
        require(q < num_qubits, [&] {
            return std::string(what) + ": qubit index " + std::to_string(q) +
                   " out of range for " + std::to_string(num_qubits) +
                   " qubits";
        });
        require((seen >> q & 1U) == 0, [&] {
            return std::string(what) + ": duplicate qubit index " +
                   std::to_string(q);
        });
        seen |= std::uint64_t{1} << q;
    }
}

void check_unitary(double err, const char *what) {
    require(err < kUnitarityTol, [&] {
        return std::string(what) +
               ": matrix is not unitary (|U^dag U - I|_max = " +
               std::to_string(err) + ")";
    });
}

void check_gate_fits(const GateOp &gate, unsigned num_qubits) {
    const auto support = gate.support();
    if (!support.empty()) {
        require(support.back() < num_qubits, [&] {
            return "apply_gate: qubit index " + std::to_string(support.back()) +
                   " out of range for " + std::to_string(num_qubits) +
                   " qubits";
        });
    }
}

struct ControlMask {
    std::uint64_t mask = 0;
    std::uint64_t value = 0;
};

ControlMask control_mask(std::span<const Control> controls, unsigned shift) {
    ControlMask cm;
    for (const Control &c : controls) {
        cm.mask |= std::uint64_t{1} << (c.qubit + shift);
        if (c.polarity) {
            cm.value |= std::uint64_t{1} << (c.qubit + shift);
        }
    }
    return cm;
}

/// Dense 2^t x 2^t matrix on `targets` with controls; scalar only, as it
/// only serves the general detector-unitary family.
void apply_multi(cplx *amps, unsigned num_qubits,
                 std::span<const unsigned> targets, ControlMask cm,
                 const Eigen::MatrixXcd &m) {
    std::uint64_t fixed_mask = cm.mask;
    for (unsigned t : targets) {
        fixed_mask |= std::uint64_t{1} << t;
    }
    std::vector<unsigned> fixed;
    for (std::uint64_t mm = fixed_mask; mm != 0; mm &= mm - 1) {
        fixed.push_back(static_cast<unsigned>(std::countr_zero(mm)));
    }
    const std::size_t sub = std::size_t{1} << targets.size();
    std::vector<std::uint64_t> offsets(sub);
    for (std::size_t x = 0; x < sub; ++x) {
        offsets[x] = bits::deposit_bits(x, targets);
    }
    Eigen::VectorXcd in(sub);
    Eigen::VectorXcd out(sub);
    const std::uint64_t count = std::uint64_t{1} << (num_qubits - fixed.size());
    for (std::uint64_t k = 0; k < count; ++k) {
        const std::uint64_t base = bits::insert_zero_bits(k, fixed) | cm.value;
        for (std::size_t x = 0; x < sub; ++x) {
            in[x] = amps[base | offsets[x]];
        }
        out.noalias() = m * in;
        for (std::size_t x = 0; x < sub; ++x) {
            amps[base | offsets[x]] = out[x];
        }
    }
}

std::vector<cplx> phase_factors(const std::vector<double> &phases,
                                double sign) {
    std::vector<cplx> f(phases.size());
    for (std::size_t i = 0; i < phases.size(); ++i) {
        f[i] = std::polar(1.0, sign * phases[i]);
    }
    return f;
}

std::vector<unsigned> shifted(std::span<const unsigned> qubits,
                              unsigned shift) {
    std::vector<unsigned> out(qubits.begin(), qubits.end());
    for (unsigned &q : out) {
        q += shift;
    }
    return out;
}

/// Applies `gate` to a vector over `num_qubits` with every index shifted by
/// `shift`; `conjugate` selects conj(U) for the column side of rho.
void apply_on_vector(cplx *amps, unsigned num_qubits, const GateOp &gate,
                     unsigned shift, bool conjugate) {
    const auto &k = kernels::active_kernels();
    std::visit(
        [&](const auto &g) {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, SingleGate>) {
                k.apply_1q(amps, num_qubits, g.target + shift, 0, 0,
                           conjugate ? conj(g.matrix) : g.matrix);
            } else if constexpr (std::is_same_v<G, ControlledGate>) {
                const auto cm = control_mask(std::span(&g.control, 1), shift);
                k.apply_1q(amps, num_qubits, g.target + shift, cm.mask,
                           cm.value, conjugate ? conj(g.matrix) : g.matrix);
            } else if constexpr (std::is_same_v<G, MultiControlledGate>) {
                const auto cm = control_mask(g.controls, shift);
                if (g.targets.size() == 1) {
                    Mat2 m = to_mat2(g.matrix);
                    k.apply_1q(amps, num_qubits, g.targets[0] + shift, cm.mask,
                               cm.value, conjugate ? conj(m) : m);
                } else {
                    const auto targets = shifted(g.targets, shift);
                    if (conjugate) {
                        apply_multi(amps, num_qubits, targets, cm,
                                    g.matrix.conjugate());
                    } else {
                        apply_multi(amps, num_qubits, targets, cm, g.matrix);
                    }
                }
            } else {
                const auto qubits = shifted(g.qubits, shift);
                const auto f = phase_factors(g.phases, conjugate ? -1.0 : 1.0);
                k.apply_diagonal(amps, num_qubits, qubits, f.data());
            }
        },
        gate.op());
}

} // namespace

// ---------------------------------------------------------------------------
// Matrix helpers

double unitarity_error(const Eigen::MatrixXcd &u) {
    if (u.rows() != u.cols() || u.rows() == 0) {
        return INFINITY;
    }
    const Eigen::MatrixXcd d =
        u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff();
}

double unitarity_error(const Mat2 &u) {
    // Entries of U^dagger U - I.
    const double a = std::norm(u.m00) + std::norm(u.m10) - 1.0;
    const double d = std::norm(u.m01) + std::norm(u.m11) - 1.0;
    const cplx b = std::conj(u.m00) * u.m01 + std::conj(u.m10) * u.m11;
    return std::max({std::abs(a), std::abs(d), std::abs(b)});
}

Mat2 to_mat2(const Eigen::Matrix2cd &m) {
    return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
}

Mat2 conj(const Mat2 &m) {
    return {std::conj(m.m00), std::conj(m.m01), std::conj(m.m10),
            std::conj(m.m11)};
}

Mat2 adjoint(const Mat2 &m) {
    return {std::conj(m.m00), std::conj(m.m10), std::conj(m.m01),
            std::conj(m.m11)};
}

Mat2 rotation(double theta) {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    return {c, -s, s, c};
}

Mat2 hadamard() {
    constexpr double r = std::numbers::sqrt2 / 2;
    return {r, r, r, -r};
}

// ---------------------------------------------------------------------------
// States

double PureState::norm_squared() const {
    return kernels::active_kernels().norm2(amps_.data(), amps_.size());
}

PureState PureState::from_amplitudes(std::vector<cplx> amps) {
    require(amps.size() >= 2 && std::has_single_bit(amps.size()),
            "PureState: amplitude count must be a power of two >= 2");
    const unsigned q = static_cast<unsigned>(std::countr_zero(amps.size()));
    PureState s(q, std::move(amps));
    require(std::abs(s.norm_squared() - 1.0) < kNormTol,
            "PureState: amplitudes are not normalized");
    return s;
}

PureState init_pure(unsigned num_qubits, unsigned max_qubits) {
    require(num_qubits >= 1, "init_pure: need at least one qubit");
    require(num_qubits <= max_qubits, [&] {
        return "init_pure: " + std::to_string(num_qubits) +
               " qubits exceeds the configured maximum of " +
               std::to_string(max_qubits);
    });
    std::vector<cplx> amps(std::size_t{1} << num_qubits);
    amps[0] = 1.0;
    return PureState(num_qubits, std::move(amps));
}

cplx MixedState::trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        t += (*this)(i, i);
    }
    return t;
}

Eigen::MatrixXcd MixedState::to_matrix() const {
    const auto d = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXcd m(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            m(r, c) = (*this)(r, c);
        }
    }
    return m;
}

bool MixedState::is_valid(double tol, double psd_tol) const {
    const std::size_t d = dim();
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = r; c < d; ++c) {
            if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) {
                return false;
            }
        }
    }
    if (std::abs(trace() - 1.0) > tol) {
        return false;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_matrix(),
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -psd_tol;
}

MixedState MixedState::from_matrix(const Eigen::MatrixXcd &m) {
    const auto d = static_cast<std::size_t>(m.rows());
    require(m.rows() == m.cols() && d >= 2 && std::has_single_bit(d),
            "MixedState: matrix must be square with power-of-two size >= 2");
    std::vector<cplx> data(d * d);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            data[r * d + c] =
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    MixedState s(static_cast<unsigned>(std::countr_zero(d)), std::move(data));
    require(s.is_valid(1e-10, 1e-10),
            "MixedState: matrix is not a valid density matrix");
    return s;
}

MixedState MixedState::from_pure(const PureState &psi) {
    const std::size_t d = psi.dim();
    std::vector<cplx> data(d * d);
    const auto a = psi.amplitudes();
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            data[r * d + c] = a[r] * std::conj(a[c]);
        }
    }
    return MixedState(psi.num_qubits(), std::move(data));
}

MixedState init_mixed(unsigned num_qubits, std::span<const double> epsilon,
                      unsigned max_qubits) {
    require(num_qubits >= 1, "init_mixed: need at least one qubit");
    require(num_qubits <= max_qubits, [&] {
        return "init_mixed: " + std::to_string(num_qubits) +
               " qubits exceeds the configured maximum of " +
               std::to_string(max_qubits);
    });
    require(epsilon.size() == 1 || epsilon.size() == num_qubits,
            "init_mixed: need one epsilon or one per qubit");
    for (double e : epsilon) {
        require(e >= 0.0 && e <= 1.0, [&] {
            return "init_mixed: epsilon " + std::to_string(e) +
                   " outside [0, 1]";
        });
    }
    const std::size_t d = std::size_t{1} << num_qubits;
    std::vector<cplx> data(d * d);
    for (std::size_t i = 0; i < d; ++i) {
        double w = 1.0;
        for (unsigned q = 0; q < num_qubits; ++q) {
            const double e = epsilon.size() == 1 ? epsilon[0] : epsilon[q];
            w *= ((i >> q) & 1U) ? e : 1.0 - e;
        }
        data[i * d + i] = w;
    }
    return MixedState(num_qubits, std::move(data));
}

// ---------------------------------------------------------------------------
// Gates

GateOp GateOp::single(unsigned target, const Mat2 &m, GateTag tag) {
    check_unitary(unitarity_error(m), "GateOp::single");
    return GateOp(SingleGate{target, m}, tag);
}

GateOp GateOp::controlled(Control control, unsigned target, const Mat2 &m,
                          GateTag tag) {
    check_unitary(unitarity_error(m), "GateOp::controlled");
    require(control.qubit != target,
            "GateOp::controlled: control and target coincide");
    return GateOp(ControlledGate{control, target, m}, tag);
}

GateOp GateOp::multi_controlled(std::vector<Control> controls,
                                std::vector<unsigned> targets,
                                Eigen::MatrixXcd m, GateTag tag) {
    require(!targets.empty(), "GateOp::multi_controlled: no target qubits");
    require(targets.size() <= 16,
            "GateOp::multi_controlled: too many target qubits");
    const auto sub = Eigen::Index{1} << targets.size();
    require(m.rows() == sub && m.cols() == sub,
            "GateOp::multi_controlled: matrix size does not match targets");
    check_unitary(unitarity_error(m), "GateOp::multi_controlled");
    std::vector<unsigned> all(targets);
    for (const Control &c : controls) {
        all.push_back(c.qubit);
    }
    check_register(all, 64, "GateOp::multi_controlled");
    return GateOp(MultiControlledGate{std::move(controls), std::move(targets),
                                      std::move(m)},
                  tag);
}

GateOp GateOp::diagonal_phase(std::vector<unsigned> qubits,
                              std::vector<double> phases, GateTag tag) {
    require(!qubits.empty(), "GateOp::diagonal_phase: no qubits");
    check_register(qubits, 64, "GateOp::diagonal_phase");
    require(phases.size() == (std::size_t{1} << qubits.size()),
            "GateOp::diagonal_phase: need 2^|qubits| phases");
    for (double p : phases) {
        require(std::isfinite(p), "GateOp::diagonal_phase: non-finite phase");
    }
    return GateOp(DiagonalPhaseGate{std::move(qubits), std::move(phases)}, tag);
}

std::vector<unsigned> GateOp::support() const {
    std::vector<unsigned> out;
    std::visit(
        [&](const auto &g) {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, SingleGate>) {
                out = {g.target};
            } else if constexpr (std::is_same_v<G, ControlledGate>) {
                out = {g.control.qubit, g.target};
            } else if constexpr (std::is_same_v<G, MultiControlledGate>) {
                out = g.targets;
                for (const Control &c : g.controls) {
                    out.push_back(c.qubit);
                }
            } else {
                out = g.qubits;
            }
        },
        op_);
    std::sort(out.begin(), out.end());
    return out;
}

GateOp GateOp::remapped(std::span<const unsigned> map) const {
    GateOp out = *this;
    std::visit(
        [&](auto &g) {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, SingleGate>) {
                g.target = map[g.target];
            } else if constexpr (std::is_same_v<G, ControlledGate>) {
                g.control.qubit = map[g.control.qubit];
                g.target = map[g.target];
            } else if constexpr (std::is_same_v<G, MultiControlledGate>) {
                for (unsigned &t : g.targets) {
                    t = map[t];
                }
                for (Control &c : g.controls) {
                    c.qubit = map[c.qubit];
                }
            } else {
                for (unsigned &q : g.qubits) {
                    q = map[q];
                }
            }
        },
        out.op_);
    return out;
}

void apply_gate(PureState &state, const GateOp &gate) {
    check_gate_fits(gate, state.num_qubits());
    apply_on_vector(state.amplitudes().data(), state.num_qubits(), gate, 0,
                    false);
}

void apply_gate(MixedState &state, const GateOp &gate) {
    const unsigned q = state.num_qubits();
    check_gate_fits(gate, q);
    cplx *data = state.data().data();
    apply_on_vector(data, 2 * q, gate, q, false);
    apply_on_vector(data, 2 * q, gate, 0, true);
}

// ---------------------------------------------------------------------------
// Reductions

MixedState partial_trace(const MixedState &state,
                         std::span<const unsigned> keep) {
    const unsigned q = state.num_qubits();
    require(!keep.empty(), "partial_trace: keep list is empty");
    check_register(keep, q, "partial_trace");
    std::vector<unsigned> traced;
    for (unsigned i = 0; i < q; ++i) {
        if (std::find(keep.begin(), keep.end(), i) == keep.end()) {
            traced.push_back(i);
        }
    }
    const std::size_t kd = std::size_t{1} << keep.size();
    const std::size_t td = std::size_t{1} << traced.size();
    std::vector<std::uint64_t> keep_off(kd);
    std::vector<std::uint64_t> trace_off(td);
    for (std::size_t a = 0; a < kd; ++a) {
        keep_off[a] = bits::deposit_bits(a, keep);
    }
    for (std::size_t t = 0; t < td; ++t) {
        trace_off[t] = bits::deposit_bits(t, traced);
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(
        static_cast<Eigen::Index>(kd), static_cast<Eigen::Index>(kd));
    for (std::size_t a = 0; a < kd; ++a) {
        for (std::size_t b = 0; b < kd; ++b) {
            cplx s = 0.0;
            for (std::size_t t = 0; t < td; ++t) {
                s += state(keep_off[a] | trace_off[t],
                           keep_off[b] | trace_off[t]);
            }
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = s;
        }
    }
    return MixedState::from_matrix(out);
}

std::vector<double> outcome_probabilities(const PureState &state,
                                          std::span<const unsigned> reg) {
    check_register(reg, state.num_qubits(), "outcome_probabilities");
    std::vector<double> p2(state.dim());
    kernels::active_kernels().abs2(state.amplitudes().data(), state.dim(),
                                   p2.data());
    std::vector<double> out(std::size_t{1} << reg.size(), 0.0);
    for (std::size_t i = 0; i < p2.size(); ++i) {
        out[bits::extract_bits(i, reg)] += p2[i];
    }
    return out;
}

std::vector<double> outcome_probabilities(const MixedState &state,
                                          std::span<const unsigned> reg) {
    check_register(reg, state.num_qubits(), "outcome_probabilities");
    std::vector<double> out(std::size_t{1} << reg.size(), 0.0);
    for (std::size_t i = 0; i < state.dim(); ++i) {
        out[bits::extract_bits(i, reg)] += state(i, i).real();
    }
    return out;
}

} // namespace wpd
