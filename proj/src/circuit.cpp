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

#include "wpd/circuit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <type_traits>

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

Mat2 beam_splitter(const NoiseParams &noise) {
    const double t = noise.T;
    const double s = std::sqrt(1.0 - t * t);
    return {t, s, s, -t};
}

void append_beam_splitter(std::vector<GateOp> &gates,
                          const InterferometerSpec &spec) {
    const Mat2 h = beam_splitter(spec.noise);
    for (unsigned i = 0; i < spec.particle_qubits(); ++i) {
        gates.push_back(GateOp::single(i, h, GateTag::BeamSplitter));
    }
}

void append_which_path(std::vector<GateOp> &gates,
                       const InterferometerSpec &spec) {
    const unsigned n = spec.particle_qubits();
    if (std::holds_alternative<PerQubitRotation>(spec.detector)) {
        const Mat2 r = rotation(spec.effective_theta());
        for (unsigned i = 0; i < n; ++i) {
            gates.push_back(
                GateOp::controlled({i, true}, n + i, r, GateTag::WhichPath));
        }
        return;
    }
    const auto &us = std::get<ExplicitUnitaries>(spec.detector).unitaries;
    const auto detectors = spec.detector_register();
    for (unsigned j = 1; j < spec.num_paths; ++j) {
        std::vector<Control> controls;
        for (unsigned i = 0; i < n; ++i) {
            controls.push_back({i, ((j >> i) & 1U) != 0});
        }
        gates.push_back(GateOp::multi_controlled(std::move(controls), detectors,
                                                 us[j], GateTag::WhichPath));
    }
}

} // namespace

void NoiseParams::validate() const {
    require(epsilon >= 0.0 && epsilon <= 0.5, [&] {
        return "noise: epsilon must lie in [0, 0.5], got " +
               std::to_string(epsilon);
    });
    require(T > 0.0 && T < 1.0, [&] {
        return "noise: T must lie in (0, 1), got " + std::to_string(T);
    });
    require(gamma >= 0.0 && gamma <= 2.0, [&] {
        return "noise: gamma must lie in [0, 2], got " + std::to_string(gamma);
    });
}

unsigned InterferometerSpec::particle_qubits() const {
    return static_cast<unsigned>(std::countr_zero(num_paths));
}

std::vector<unsigned> InterferometerSpec::particle_register() const {
    std::vector<unsigned> r(particle_qubits());
    for (unsigned i = 0; i < r.size(); ++i) {
        r[i] = i;
    }
    return r;
}

std::vector<unsigned> InterferometerSpec::detector_register() const {
    const unsigned n = particle_qubits();
    std::vector<unsigned> r(n);
    for (unsigned i = 0; i < n; ++i) {
        r[i] = n + i;
    }
    return r;
}

void InterferometerSpec::validate() const {
    require(num_paths >= 2 && std::has_single_bit(num_paths), [&] {
        return "spec: number of paths must be a power of two >= 2, got " +
               std::to_string(num_paths);
    });
    require(num_paths <= kMaxPaths, [&] {
        return "spec: at most " + std::to_string(kMaxPaths) +
               " paths supported";
    });
    require(std::isfinite(theta), "spec: theta must be finite");
    require(phases.empty() || phases.size() == num_paths, [&] {
        return "spec: need one phase per path (" + std::to_string(num_paths) +
               "), got " + std::to_string(phases.size());
    });
    noise.validate();
    if (const auto *ex = std::get_if<ExplicitUnitaries>(&detector)) {
        const auto dim = Eigen::Index{1} << particle_qubits();
        require(ex->unitaries.size() == num_paths,
                "spec: need one detector unitary per path");
        for (std::size_t j = 0; j < ex->unitaries.size(); ++j) {
            const auto &u = ex->unitaries[j];
            require(u.rows() == dim && u.cols() == dim, [&] {
                return "spec: detector unitary " + std::to_string(j) +
                       " must be " + std::to_string(dim) + "x" +
                       std::to_string(dim);
            });
            require(unitarity_error(u) < kUnitarityTol, [&] {
                return "spec: detector unitary " + std::to_string(j) +
                       " is not unitary";
            });
        }
        const auto &u0 = ex->unitaries.front();
        require(
            (u0 - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff() <
                kUnitarityTol,
            "spec: U_0 must be the identity");
    }
}

InterferometerSpec InterferometerSpec::rotation(unsigned num_paths,
                                                double theta) {
    InterferometerSpec s;
    s.num_paths = num_paths;
    s.theta = theta;
    s.phases.assign(num_paths, 0.0);
    s.validate();
    return s;
}

InterferometerSpec InterferometerSpec::explicit_unitaries(
    std::vector<Eigen::MatrixXcd> unitaries) {
    InterferometerSpec s;
    s.num_paths = static_cast<unsigned>(unitaries.size());
    s.detector = ExplicitUnitaries{std::move(unitaries)};
    s.phases.assign(s.num_paths, 0.0);
    s.validate();
    return s;
}

ParticleReadout particle_readout(const InterferometerSpec &spec) {
    ParticleReadout p{spec.phases};
    if (p.phases.empty()) {
        p.phases.assign(spec.num_paths, 0.0);
    }
    return p;
}

Eigen::MatrixXcd detector_unitary(unsigned j, const InterferometerSpec &spec) {
    require(j < spec.num_paths, [&] {
        return "detector_unitary: path index " + std::to_string(j) +
               " out of range";
    });
    if (const auto *ex = std::get_if<ExplicitUnitaries>(&spec.detector)) {
        return ex->unitaries[j];
    }
    const unsigned n = spec.particle_qubits();
    const Mat2 r = rotation(spec.effective_theta());
    const cplx rm[2][2] = {{r.m00, r.m01}, {r.m10, r.m11}};
    const auto dim = Eigen::Index{1} << n;
    Eigen::MatrixXcd u(dim, dim);
    for (Eigen::Index row = 0; row < dim; ++row) {
        for (Eigen::Index col = 0; col < dim; ++col) {
            cplx v = 1.0;
            for (unsigned i = 0; i < n; ++i) {
                const auto ri = (row >> i) & 1;
                const auto ci = (col >> i) & 1;
                v *= ((j >> i) & 1U) ? rm[ri][ci] : cplx(ri == ci ? 1.0 : 0.0);
            }
            u(row, col) = v;
        }
    }
    return u;
}

std::vector<GateOp> build_circuit(const InterferometerSpec &spec,
                                  const CircuitVariant &variant,
                                  const BuildOptions &options) {
    spec.validate();
    std::vector<GateOp> gates;
    gates.reserve(4 * spec.particle_qubits() + spec.num_paths + 1);
    append_beam_splitter(gates, spec);
    append_which_path(gates, spec);

    if (const auto *pr = std::get_if<ParticleReadout>(&variant)) {
        require(pr->phases.size() == spec.num_paths,
                "build_circuit: need one phase per path");
        const bool all_zero = std::all_of(pr->phases.begin(), pr->phases.end(),
                                          [](double p) { return p == 0.0; });
        if (!(all_zero && options.drop_zero_phase)) {
            gates.push_back(
                GateOp::diagonal_phase(spec.particle_register(), pr->phases));
        }
        append_beam_splitter(gates, spec);
        return gates;
    }

    const unsigned k = std::get<DetectorReadout>(variant).k;
    require(k < spec.num_paths, [&] {
        return "build_circuit: detector readout index " + std::to_string(k) +
               " out of range";
    });
    const unsigned n = spec.particle_qubits();
    if (std::holds_alternative<PerQubitRotation>(spec.detector)) {
        // U_k^dagger = tensor product of R(-theta) on the set bits of k.
        const Mat2 r_inv = rotation(-spec.effective_theta());
        for (unsigned i = 0; i < n; ++i) {
            if ((k >> i) & 1U) {
                gates.push_back(
                    GateOp::single(n + i, r_inv, GateTag::DetectorInverse));
            }
        }
    } else if (k != 0) {
        const auto &u = std::get<ExplicitUnitaries>(spec.detector).unitaries[k];
        gates.push_back(GateOp::multi_controlled({}, spec.detector_register(),
                                                 u.adjoint(),
                                                 GateTag::DetectorInverse));
    }
    return gates;
}

} // namespace wpd
