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
 * N-path interferometer circuits on 2 log2(N) qubits.
 *
 * The particle register occupies qubits [0, n) and the which-path detector
 * register qubits [n, 2n), n = log2(N). Path j is the particle basis state
 * whose register value is j. A circuit is:
 *
 *   beam splitter   Hadamard on every particle qubit
 *   which-path      PerQubitRotation: particle qubit i controls R(theta) on
 *                   detector qubit i (n gates). ExplicitUnitaries: one
 *                   multi-controlled U_j per path j >= 1 (N - 1 gates).
 *   then either
 *     ParticleReadout   diagonal phase exp(i phi_j) on |j>, Hadamard layer,
 *                       measure the particle register
 *     DetectorReadout   U_k^dagger on the detector register, measure it
 */
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "wpd/noise_params.hpp"
#include "wpd/statevec.hpp"

namespace wpd {

inline constexpr unsigned kMaxPaths = 256;

/// R(theta) on detector qubit i for every set bit i of the path index,
/// theta shared by all of them.
struct PerQubitRotation {};

/// U_0 ... U_{N-1} given as 2^n x 2^n unitaries; U_0 must be the identity.
struct ExplicitUnitaries {
    std::vector<Eigen::MatrixXcd> unitaries;
};

using DetectorMode = std::variant<PerQubitRotation, ExplicitUnitaries>;

struct InterferometerSpec {
    unsigned num_paths = 2;
    double theta = 0.0;
    DetectorMode detector = PerQubitRotation{};
    std::vector<double> phases; ///< one per path, radians
    NoiseParams noise = NoiseParams::ideal();
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;

    unsigned particle_qubits() const;
    unsigned detector_qubits() const { return particle_qubits(); }
    unsigned total_qubits() const { return 2 * particle_qubits(); }

    /// Rotation angle as realized by the (possibly imperfect) hardware.
    double effective_theta() const { return noise.gamma * theta; }

    std::vector<unsigned> particle_register() const;
    std::vector<unsigned> detector_register() const;

    /// Throws std::invalid_argument on any violated invariant.
    void validate() const;

    /// PerQubitRotation spec with zero phases and ideal noise.
    static InterferometerSpec rotation(unsigned num_paths, double theta);
    static InterferometerSpec
    explicit_unitaries(std::vector<Eigen::MatrixXcd> unitaries);
};

struct ParticleReadout {
    std::vector<double> phases;
};

struct DetectorReadout {
    unsigned k = 0;
};

using CircuitVariant = std::variant<ParticleReadout, DetectorReadout>;

/// ParticleReadout with the spec's own phase setting.
ParticleReadout particle_readout(const InterferometerSpec &spec);

/// U_j of the detector register, with the effective rotation angle in
/// PerQubitRotation mode.
Eigen::MatrixXcd detector_unitary(unsigned j, const InterferometerSpec &spec);

struct BuildOptions {
    /// Omit the phase layer when every phase is zero.
    bool drop_zero_phase = true;
};

std::vector<GateOp> build_circuit(const InterferometerSpec &spec,
                                  const CircuitVariant &variant,
                                  const BuildOptions &options = {});

/// Memo of simulated product blocks, keyed by their exact gate content.
/// Holds final marginals and, separately, the states reached after the
/// beam-splitter and which-path stages, which every readout of the same
/// interferometer shares. Not thread-safe; give each task its own.
class SimCache {
  public:
    using State = std::variant<PureState, MixedState>;

    const std::vector<double> *find(const std::string &key) const;
    void insert(std::string key, std::vector<double> marginal);
    const State *find_state(const std::string &key) const;
    const State &insert_state(std::string key, State state);

    std::size_t size() const { return entries_.size(); }
    std::size_t hits() const { return hits_; }

  private:
    std::map<std::string, std::vector<double>> entries_;
    std::map<std::string, State> states_;
    mutable std::size_t hits_ = 0;
};

struct RunOptions {
    /// Simulate independent qubit blocks separately. The initial state is a
    /// product over qubits, so blocks that no gate connects stay in a
    /// product state and their marginals multiply.
    bool factorize = true;
    SimCache *cache = nullptr;
    BuildOptions build;
};

/// Exact Born probabilities of the measured register (particle for
/// ParticleReadout, detector for DetectorReadout); outcome bit b is register
/// qubit b. Uses the pure backend when epsilon = 0 and density matrices
/// otherwise.
std::vector<double> run(const InterferometerSpec &spec,
                        const CircuitVariant &variant,
                        const RunOptions &options = {});

/// Full joint state after the beam splitter and which-path stage.
MixedState state_after_which_path(const InterferometerSpec &spec);

} // namespace wpd
