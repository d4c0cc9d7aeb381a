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
#include <cstring>
#include <numeric>

#include "kernels/bits.hpp"
#include "wpd/circuit.hpp"

namespace wpd {
namespace {

class DisjointSets {
  public:
    explicit DisjointSets(unsigned n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0U);
    }
    unsigned find(unsigned x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(unsigned a, unsigned b) { parent_[find(a)] = find(b); }

  private:
    std::vector<unsigned> parent_;
};

/// One independently simulated group of qubits.
struct Block {
    std::vector<unsigned> qubits;         ///< global indices, ascending
    std::vector<GateOp> gates;            ///< in local indices
    std::vector<unsigned> measured_local; ///< local qubit per measured bit
    std::vector<unsigned> register_bits;  ///< register bit per measured bit
};

template <class T> void put(std::string &key, const T &v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    key.append(buf, sizeof(T));
}

void put_mat2(std::string &key, const Mat2 &m) {
    for (const cplx &z : {m.m00, m.m01, m.m10, m.m11}) {
        put(key, z.real());
        put(key, z.imag());
    }
}

/// Leading gates that do not depend on the readout: the beam splitter and
/// which-path stages.
std::size_t shared_prefix(const Block &b) {
    std::size_t n = 0;
    while (n < b.gates.size() && (b.gates[n].tag() == GateTag::BeamSplitter ||
                                  b.gates[n].tag() == GateTag::WhichPath)) {
        ++n;
    }
    return n;
}

void put_gate(std::string &key, const GateOp &g) {
    put(key, static_cast<unsigned char>(g.op().index()));
    std::visit(
        [&](const auto &op) {
            using G = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<G, SingleGate>) {
                put(key, op.target);
                put_mat2(key, op.matrix);
            } else if constexpr (std::is_same_v<G, ControlledGate>) {
                put(key, op.control.qubit);
                put(key, op.control.polarity);
                put(key, op.target);
                put_mat2(key, op.matrix);
            } else if constexpr (std::is_same_v<G, MultiControlledGate>) {
                put(key, static_cast<unsigned>(op.controls.size()));
                for (const Control &c : op.controls) {
                    put(key, c.qubit);
                    put(key, c.polarity);
                }
                put(key, static_cast<unsigned>(op.targets.size()));
                for (unsigned t : op.targets) {
                    put(key, t);
                }
                for (Eigen::Index i = 0; i < op.matrix.size(); ++i) {
                    put(key, op.matrix.data()[i].real());
                    put(key, op.matrix.data()[i].imag());
                }
            } else {
                put(key, static_cast<unsigned>(op.qubits.size()));
                for (unsigned q : op.qubits) {
                    put(key, q);
                }
                for (double p : op.phases) {
                    put(key, p);
                }
            }
        },
        g.op());
}

struct BlockKey {
    std::string full;        ///< whole block, including the measured qubits
    std::size_t prefix_size; ///< bytes of `full` covering the shared prefix
};

BlockKey block_key(const Block &b, bool pure, double epsilon,
                   std::size_t prefix) {
    BlockKey k;
    std::string &key = k.full;
    key.reserve(64 + 80 * b.gates.size());
    put(key, static_cast<char>(pure ? 'P' : 'M'));
    put(key, epsilon);
    put(key, static_cast<unsigned>(b.qubits.size()));
    for (std::size_t i = 0; i < b.gates.size(); ++i) {
        if (i == prefix) {
            k.prefix_size = key.size();
        }
        put_gate(key, b.gates[i]);
    }
    if (prefix == b.gates.size()) {
        k.prefix_size = key.size();
    }
    put(key, static_cast<unsigned>(b.measured_local.size()));
    for (unsigned m : b.measured_local) {
        put(key, m);
    }
    return k;
}

template <class State>
std::vector<double> finish(State s, const Block &b, std::size_t from) {
    apply_gates(s, std::span<const GateOp>(b.gates).subspan(from));
    return outcome_probabilities(s, b.measured_local);
}

SimCache::State initial_state(const Block &b, bool pure, double epsilon) {
    const auto nq = static_cast<unsigned>(b.qubits.size());
    if (pure) {
        return init_pure(nq);
    }
    return init_mixed(nq, std::span(&epsilon, 1));
}

std::vector<double> simulate_block(const Block &b, bool pure, double epsilon,
                                   SimCache *cache, const BlockKey *key,
                                   std::size_t prefix) {
    if (cache == nullptr || prefix == 0 || prefix == b.gates.size()) {
        return std::visit([&](auto s) { return finish(std::move(s), b, 0); },
                          initial_state(b, pure, epsilon));
    }
    const std::string prefix_key = key->full.substr(0, key->prefix_size);
    const SimCache::State *state = cache->find_state(prefix_key);
    if (state == nullptr) {
        SimCache::State s = initial_state(b, pure, epsilon);
        std::visit(
            [&](auto &st) {
                apply_gates(st, std::span<const GateOp>(b.gates).first(prefix));
            },
            s);
        state = &cache->insert_state(prefix_key, std::move(s));
    }
    return std::visit([&](const auto &s) { return finish(s, b, prefix); },
                      *state);
}

std::vector<Block> split_blocks(const std::vector<GateOp> &gates,
                                unsigned num_qubits,
                                std::span<const unsigned> measured,
                                bool factorize) {
    DisjointSets sets(num_qubits);
    std::vector<std::vector<unsigned>> supports;
    supports.reserve(gates.size());
    for (const GateOp &g : gates) {
        supports.push_back(g.support());
        const auto &s = supports.back();
        for (std::size_t i = 1; i < s.size(); ++i) {
            sets.unite(s[0], s[i]);
        }
    }
    if (!factorize) {
        for (unsigned q = 1; q < num_qubits; ++q) {
            sets.unite(0, q);
        }
    }

    // Blocks without a measured qubit do not affect the marginal.
    std::vector<int> block_of_root(num_qubits, -1);
    std::vector<Block> blocks;
    for (std::size_t bit = 0; bit < measured.size(); ++bit) {
        const unsigned root = sets.find(measured[bit]);
        if (block_of_root[root] < 0) {
            block_of_root[root] = static_cast<int>(blocks.size());
            blocks.emplace_back();
        }
        blocks[block_of_root[root]].register_bits.push_back(
            static_cast<unsigned>(bit));
    }
    std::vector<unsigned> local(num_qubits, 0);
    for (unsigned q = 0; q < num_qubits; ++q) {
        const int b = block_of_root[sets.find(q)];
        if (b >= 0) {
            local[q] = static_cast<unsigned>(blocks[b].qubits.size());
            blocks[b].qubits.push_back(q);
        }
    }
    for (Block &b : blocks) {
        for (unsigned bit : b.register_bits) {
            b.measured_local.push_back(local[measured[bit]]);
        }
    }
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const int b = block_of_root[sets.find(supports[i].front())];
        if (b >= 0) {
            blocks[b].gates.push_back(gates[i].remapped(local));
        }
    }
    return blocks;
}

} // namespace

const std::vector<double> *SimCache::find(const std::string &key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        return nullptr;
    }
    ++hits_;
    return &it->second;
}

void SimCache::insert(std::string key, std::vector<double> marginal) {
    entries_.emplace(std::move(key), std::move(marginal));
}

const SimCache::State *SimCache::find_state(const std::string &key) const {
    const auto it = states_.find(key);
    return it == states_.end() ? nullptr : &it->second;
}

const SimCache::State &SimCache::insert_state(std::string key, State state) {
    return states_.insert_or_assign(std::move(key), std::move(state))
        .first->second;
}

std::vector<double> run(const InterferometerSpec &spec,
                        const CircuitVariant &variant,
                        const RunOptions &options) {
    const std::vector<GateOp> gates =
        build_circuit(spec, variant, options.build);
    const std::vector<unsigned> measured =
        std::holds_alternative<ParticleReadout>(variant)
            ? spec.particle_register()
            : spec.detector_register();
    const bool pure = spec.noise.epsilon == 0.0;
    const double eps = spec.noise.epsilon;

    const auto blocks =
        split_blocks(gates, spec.total_qubits(), measured, options.factorize);

    std::vector<double> out(std::size_t{1} << measured.size(), 1.0);
    for (const Block &b : blocks) {
        std::vector<double> local_marginal;
        const std::vector<double> *marginal = nullptr;
        const std::size_t prefix = shared_prefix(b);
        BlockKey key;
        if (options.cache != nullptr) {
            key = block_key(b, pure, eps, prefix);
            marginal = options.cache->find(key.full);
        }
        if (marginal == nullptr) {
            local_marginal =
                simulate_block(b, pure, eps, options.cache, &key, prefix);
            marginal = &local_marginal;
        }
        for (std::size_t x = 0; x < out.size(); ++x) {
            out[x] *= (*marginal)[bits::extract_bits(x, b.register_bits)];
        }
        if (options.cache != nullptr && marginal == &local_marginal) {
            options.cache->insert(std::move(key.full),
                                  std::move(local_marginal));
        }
    }
    return out;
}

MixedState state_after_which_path(const InterferometerSpec &spec) {
    const auto gates = build_circuit(spec, DetectorReadout{0});
    const double eps = spec.noise.epsilon;
    MixedState s = init_mixed(spec.total_qubits(), std::span(&eps, 1));
    apply_gates(s, std::span<const GateOp>(gates));
    return s;
}

} // namespace wpd
