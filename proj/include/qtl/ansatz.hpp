// Copyright 2026 qtlearn contributors
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
 * Circuit families and their compilation to executable gate programs.
 *
 * Three families are supported, each with or without data re-uploading:
 *  - SingleQubit: one qubit, three feature angles composed on it, full
 *    (theta, gamma, phi) trainable triple per layer.
 *  - RealAmplitudes: rotation-only trainable gates V(0, 0, phi) with
 *    all-to-all controlled-X entanglement.
 *  - StrongEntangling: full trainable triples with ring controlled-X
 *    entanglement whose range cycles with the layer index.
 *
 * With re-uploading the feature block is emitted at the start of every layer;
 * without it the features are encoded exactly once, before the first layer.
 * Within a layer the temporal order is features, trainable gates, entangler.
 */

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qtl/errors.hpp"
#include "qtl/statevec.hpp"

namespace qtl {

enum class AnsatzFamily { RealAmplitudes, StrongEntangling, SingleQubit };
enum class EntanglerKind { None, AllToAll, Ring };

/// Entangler pattern implied by the family.
inline EntanglerKind default_entangler(AnsatzFamily family) {
    switch (family) {
    case AnsatzFamily::RealAmplitudes: return EntanglerKind::AllToAll;
    case AnsatzFamily::StrongEntangling: return EntanglerKind::Ring;
    case AnsatzFamily::SingleQubit: return EntanglerKind::None;
    }
    throw std::invalid_argument("unknown ansatz family");
}

/**
 * @brief Declarative description of a circuit: family, depth, width,
 * re-uploading flag, entangler pattern.
 */
struct AnsatzSpec {
    AnsatzFamily family = AnsatzFamily::StrongEntangling;
    int layers = 1;
    int qubits = 3;
    bool reuploading = false;
    EntanglerKind entangler = EntanglerKind::Ring;

    static AnsatzSpec make(AnsatzFamily family, int layers, int qubits,
                           bool reuploading) {
        AnsatzSpec spec{family, layers, qubits, reuploading,
                        default_entangler(family)};
        spec.validate();
        return spec;
    }

    void validate() const {
        if (layers < 1) throw std::invalid_argument("layers must be >= 1");
        if (family == AnsatzFamily::SingleQubit) {
            if (qubits != 1)
                throw std::invalid_argument("SingleQubit family requires qubits == 1");
        } else if (qubits != 3 && qubits != 4) {
            throw std::invalid_argument("multi-qubit families require qubits in {3, 4}");
        }
        if (entangler != default_entangler(family)) {
            throw std::invalid_argument("entangler kind inconsistent with family");
        }
    }

    /// Feature angles consumed per input: 3 for SingleQubit, one per qubit
    /// otherwise.
    int feature_count() const {
        return family == AnsatzFamily::SingleQubit ? 3 : qubits;
    }

    /// Genuinely trainable angle count. RealAmplitudes pins theta and gamma
    /// to zero, so only the rotation angle per (layer, qubit) is free.
    int free_param_count() const {
        const int per_gate = (family == AnsatzFamily::RealAmplitudes) ? 1 : 3;
        return layers * qubits * per_gate;
    }

    bool operator==(const AnsatzSpec &) const = default;
};

/**
 * @brief Trainable angles of shape (layers, qubits, 3), radians.
 *
 * For RealAmplitudes the theta/gamma slots of every triple are structurally
 * zero and excluded from the free-parameter vector.
 */
struct ParamTensor {
    int layers = 0;
    int qubits = 0;
    std::vector<double> values; // row-major (layer, qubit, slot)

    static ParamTensor zeros(const AnsatzSpec &spec) {
        ParamTensor t;
        t.layers = spec.layers;
        t.qubits = spec.qubits;
        t.values.assign(static_cast<std::size_t>(spec.layers) * spec.qubits * 3, 0.0);
        return t;
    }

    double &at(int layer, int qubit, int slot) {
        return values[(static_cast<std::size_t>(layer) * qubits + qubit) * 3 + slot];
    }
    double at(int layer, int qubit, int slot) const {
        return values[(static_cast<std::size_t>(layer) * qubits + qubit) * 3 + slot];
    }

    bool shape_matches(const AnsatzSpec &spec) const {
        return layers == spec.layers && qubits == spec.qubits &&
               values.size() == static_cast<std::size_t>(layers) * qubits * 3;
    }

    bool operator==(const ParamTensor &) const = default;
};

/// Packs the trainable slots of `params` into a flat vector ordered by
/// (layer, qubit, slot). Structural zeros are skipped.
inline std::vector<double> to_free_params(const AnsatzSpec &spec,
                                          const ParamTensor &params) {
    if (!params.shape_matches(spec)) {
        throw std::invalid_argument("ParamTensor shape does not match spec");
    }
    const bool rotation_only = spec.family == AnsatzFamily::RealAmplitudes;
    std::vector<double> free;
    free.reserve(static_cast<std::size_t>(spec.free_param_count()));
    for (int l = 0; l < spec.layers; ++l) {
        for (int q = 0; q < spec.qubits; ++q) {
            if (rotation_only) {
                free.push_back(params.at(l, q, 2));
            } else {
                free.push_back(params.at(l, q, 0));
                free.push_back(params.at(l, q, 1));
                free.push_back(params.at(l, q, 2));
            }
        }
    }
    return free;
}

/// Inverse of to_free_params; structural-zero slots come back as 0.
inline ParamTensor from_free_params(const AnsatzSpec &spec,
                                    std::span<const double> free) {
    if (free.size() != static_cast<std::size_t>(spec.free_param_count())) {
        throw std::invalid_argument("free-parameter vector length mismatch");
    }
    ParamTensor t = ParamTensor::zeros(spec);
    const bool rotation_only = spec.family == AnsatzFamily::RealAmplitudes;
    std::size_t k = 0;
    for (int l = 0; l < spec.layers; ++l) {
        for (int q = 0; q < spec.qubits; ++q) {
            if (rotation_only) {
                t.at(l, q, 2) = free[k++];
            } else {
                t.at(l, q, 0) = free[k++];
                t.at(l, q, 1) = free[k++];
                t.at(l, q, 2) = free[k++];
            }
        }
    }
    return t;
}

// --- gate program ----------------------------------------------------------

/// Feature-encoding gate_u(features[slot]) on `qubit`.
struct FeatureGate {
    int slot = 0;
    int qubit = 0;

    bool operator==(const FeatureGate &) const = default;
};

/// Trainable gate_v triple on `qubit`. param_index holds the free-parameter
/// index of (theta, gamma, phi); kFixedZero marks a structurally zero angle.
struct ParamGate {
    std::array<int, 3> param_index{};
    int qubit = 0;

    bool operator==(const ParamGate &) const = default;
};

/// Controlled-X from control to target.
struct EntanglerGate {
    int control = 0;
    int target = 0;

    bool operator==(const EntanglerGate &) const = default;
};

inline constexpr int kFixedZero = -1;

using Instruction = std::variant<FeatureGate, ParamGate, EntanglerGate>;

/**
 * @brief Ordered gate instruction list compiled from an AnsatzSpec.
 *
 * source_spec is set by build(); hand-assembled programs (used by some tests)
 * may leave it empty and must use the free-parameter forward overload.
 */
struct CircuitProgram {
    std::vector<Instruction> instructions;
    int qubit_count = 0;
    int feature_count = 0;
    int free_param_count = 0;
    std::optional<AnsatzSpec> source_spec;
};

/**
 * @brief Controlled-X pattern of one entangler block.
 *
 * AllToAll: (a, b) for all a < b in ascending lexicographic order.
 * Ring: (j, (j + r) mod q) for j = 0..q-1 with range r = ((layer-1) mod (q-1)) + 1,
 * `layer` 1-based.
 */
inline std::vector<std::pair<int, int>> entangler_block(EntanglerKind kind,
                                                        int qubits, int layer) {
    if (qubits < 2) {
        throw std::invalid_argument("entangler_block requires at least 2 qubits");
    }
    std::vector<std::pair<int, int>> pairs;
    switch (kind) {
    case EntanglerKind::AllToAll:
        for (int a = 0; a < qubits; ++a)
            for (int b = a + 1; b < qubits; ++b) pairs.emplace_back(a, b);
        break;
    case EntanglerKind::Ring: {
        const int range = ((layer - 1) % (qubits - 1)) + 1;
        for (int j = 0; j < qubits; ++j) pairs.emplace_back(j, (j + range) % qubits);
        break;
    }
    case EntanglerKind::None:
        throw std::invalid_argument("entangler_block: kind is None");
    }
    return pairs;
}

/// Compiles a spec into its instruction list.
inline CircuitProgram build(const AnsatzSpec &spec) {
    spec.validate();
    CircuitProgram program;
    program.qubit_count = spec.qubits;
    program.feature_count = spec.feature_count();
    program.free_param_count = spec.free_param_count();
    program.source_spec = spec;

    const bool single = spec.family == AnsatzFamily::SingleQubit;
    const bool rotation_only = spec.family == AnsatzFamily::RealAmplitudes;

    auto emit_features = [&] {
        for (int slot = 0; slot < program.feature_count; ++slot) {
            program.instructions.push_back(FeatureGate{slot, single ? 0 : slot});
        }
    };

    int next_free = 0;
    if (!spec.reuploading) emit_features();
    for (int layer = 1; layer <= spec.layers; ++layer) {
        if (spec.reuploading) emit_features();
        for (int q = 0; q < spec.qubits; ++q) {
            ParamGate gate;
            gate.qubit = q;
            if (rotation_only) {
                gate.param_index = {kFixedZero, kFixedZero, next_free++};
            } else {
                gate.param_index = {next_free, next_free + 1, next_free + 2};
                next_free += 3;
            }
            program.instructions.push_back(gate);
        }
        if (spec.entangler != EntanglerKind::None) {
            for (auto [control, target] :
                 entangler_block(spec.entangler, spec.qubits, layer)) {
                program.instructions.push_back(EntanglerGate{control, target});
            }
        }
    }
    return program;
}

namespace detail {

/// Angle nudge applied to one sub-angle of one instruction; used by the
/// parameter-shift machinery so shifted evaluations share this executor.
struct AngleShift {
    std::ptrdiff_t instruction = -1; // -1: no shift
    int sub_slot = 0;                // 0..2 for ParamGate, 0 for FeatureGate
    double delta = 0.0;
};

inline StateVector run_program(const CircuitProgram &program,
                               std::span<const double> free_params,
                               std::span<const double> features,
                               const AngleShift &shift = {}) {
    if (free_params.size() != static_cast<std::size_t>(program.free_param_count)) {
        throw std::invalid_argument("forward: free-parameter count mismatch");
    }
    if (features.size() != static_cast<std::size_t>(program.feature_count)) {
        throw std::invalid_argument("forward: feature vector length mismatch");
    }
    StateVector state = new_zero_state(program.qubit_count);
    for (std::ptrdiff_t idx = 0; idx < std::ssize(program.instructions); ++idx) {
        const Instruction &ins = program.instructions[idx];
        const bool shifted = (idx == shift.instruction);
        if (const auto *f = std::get_if<FeatureGate>(&ins)) {
            double angle = features[f->slot];
            if (shifted) angle += shift.delta;
            state = apply_single(std::move(state), gate_u(angle), f->qubit);
        } else if (const auto *p = std::get_if<ParamGate>(&ins)) {
            std::array<double, 3> angles{};
            for (int s = 0; s < 3; ++s) {
                const int pi = p->param_index[s];
                angles[s] = (pi == kFixedZero) ? 0.0 : free_params[pi];
                if (shifted && s == shift.sub_slot) angles[s] += shift.delta;
            }
            state = apply_single(std::move(state),
                                 gate_v(angles[0], angles[1], angles[2]), p->qubit);
        } else {
            const auto &e = std::get<EntanglerGate>(ins);
            state = apply_cnot(std::move(state), e.control, e.target);
        }
    }
    return state;
}

inline std::vector<double> expectations(const StateVector &state) {
    std::vector<double> z(static_cast<std::size_t>(state.qubit_count));
    for (int q = 0; q < state.qubit_count; ++q) z[q] = expect_z(state, q);
    return z;
}

} // namespace detail

/**
 * @brief Runs the program from |0...0> and returns the per-qubit Z
 * expectations, each in [-1, 1].
 */
inline std::vector<double> forward(const CircuitProgram &program,
                                   std::span<const double> free_params,
                                   std::span<const double> features) {
    return detail::expectations(detail::run_program(program, free_params, features));
}

/// Forward pass with one angle nudged; the executor the shift-rule gradients
/// are built on.
inline std::vector<double> forward_shifted(const CircuitProgram &program,
                                           std::span<const double> free_params,
                                           std::span<const double> features,
                                           const detail::AngleShift &shift) {
    return detail::expectations(
        detail::run_program(program, free_params, features, shift));
}

inline std::vector<double> forward(const CircuitProgram &program,
                                   const ParamTensor &params,
                                   std::span<const double> features) {
    if (!program.source_spec) {
        throw std::invalid_argument("forward(ParamTensor): program has no source spec");
    }
    const auto free = to_free_params(*program.source_spec, params);
    return forward(program, free, features);
}

// --- enum <-> string (used by config files, checkpoints, CSV rows) ---------

inline std::string to_string(AnsatzFamily family) {
    switch (family) {
    case AnsatzFamily::RealAmplitudes: return "real_amplitudes";
    case AnsatzFamily::StrongEntangling: return "strong_entangling";
    case AnsatzFamily::SingleQubit: return "single_qubit";
    }
    return "?";
}

inline AnsatzFamily family_from_string(const std::string &name) {
    if (name == "real_amplitudes") return AnsatzFamily::RealAmplitudes;
    if (name == "strong_entangling") return AnsatzFamily::StrongEntangling;
    if (name == "single_qubit") return AnsatzFamily::SingleQubit;
    throw ConfigError("unknown ansatz family: " + name);
}

inline std::string to_string(EntanglerKind kind) {
    switch (kind) {
    case EntanglerKind::None: return "none";
    case EntanglerKind::AllToAll: return "all_to_all";
    case EntanglerKind::Ring: return "ring";
    }
    return "?";
}

inline EntanglerKind entangler_from_string(const std::string &name) {
    if (name == "none") return EntanglerKind::None;
    if (name == "all_to_all") return EntanglerKind::AllToAll;
    if (name == "ring") return EntanglerKind::Ring;
    throw ConfigError("unknown entangler kind: " + name);
}

} // namespace qtl
