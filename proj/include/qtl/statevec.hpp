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
 * Dense statevector simulation for small (1-6 qubit) registers.
 *
 * Qubit 0 is the least-significant bit of the basis index. Gate application
 * uses strided amplitude updates; full gate matrices are never materialized
 * here (the Kronecker-product route exists only as a test oracle).
 */

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtl {

using cdouble = std::complex<double>;

inline constexpr int kMaxQubits = 6;

/**
 * @brief Complex amplitude vector of a q-qubit register.
 *
 * Invariant: amplitudes.size() == 2^qubit_count, and the squared norm stays
 * within 1e-9 of 1 under any sequence of gate applications on a normalized
 * state.
 */
struct StateVector {
    std::vector<cdouble> amplitudes;
    int qubit_count = 0;

    std::size_t dimension() const { return amplitudes.size(); }

    /// Sum of |amplitude|^2.
    double norm_squared() const {
        double total = 0.0;
        for (const cdouble &a : amplitudes) total += std::norm(a);
        return total;
    }
};

/// 2x2 complex gate matrix, row-major {m00, m01, m10, m11}. Unitary within
/// 1e-12 entrywise for everything this library constructs.
struct Gate2x2 {
    std::array<cdouble, 4> m{};
};

/// Prepares |0...0> on a register of `qubit_count` qubits.
inline StateVector new_zero_state(int qubit_count) {
    if (qubit_count < 1 || qubit_count > kMaxQubits) {
        throw std::invalid_argument("qubit count must be in [1, " +
                                    std::to_string(kMaxQubits) + "], got " +
                                    std::to_string(qubit_count));
    }
    StateVector state;
    state.qubit_count = qubit_count;
    state.amplitudes.assign(std::size_t{1} << qubit_count, cdouble{0.0, 0.0});
    state.amplitudes[0] = cdouble{1.0, 0.0};
    return state;
}

namespace detail {
inline void require_finite_angle(double angle, const char *name) {
    if (!std::isfinite(angle)) {
        throw std::invalid_argument(std::string(name) + " angle must be finite");
    }
}
} // namespace detail

/**
 * @brief Feature-encoding gate: e^{i phi} * [[cos phi, -sin phi], [sin phi, cos phi]].
 *
 * The global phase factor is kept as written; it can never affect a Z
 * expectation value, which the tests assert.
 */
inline Gate2x2 gate_u(double phi) {
    detail::require_finite_angle(phi, "gate_u");
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const cdouble phase{c, s}; // e^{i phi}
    return Gate2x2{{phase * c, phase * -s, phase * s, phase * c}};
}

/**
 * @brief Trainable gate V(theta) V(gamma) V(phi):
 *        diag(e^{i theta}, e^{-i theta}) * diag(e^{i gamma}, e^{-i gamma}) *
 *        [[cos phi, -sin phi], [sin phi, cos phi]].
 */
inline Gate2x2 gate_v(double theta, double gamma, double phi) {
    detail::require_finite_angle(theta, "gate_v theta");
    detail::require_finite_angle(gamma, "gate_v gamma");
    detail::require_finite_angle(phi, "gate_v phi");
    const double sum = theta + gamma;
    const cdouble up{std::cos(sum), std::sin(sum)};    // e^{+i(theta+gamma)}
    const cdouble down = std::conj(up);                // e^{-i(theta+gamma)}
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return Gate2x2{{up * c, up * -s, down * s, down * c}};
}

/**
 * @brief Applies a single-qubit gate to `target`, identity on all other qubits.
 *
 * Strided update over amplitude pairs differing only in the target bit.
 */
inline StateVector apply_single(StateVector state, const Gate2x2 &gate, int target) {
    if (target < 0 || target >= state.qubit_count) {
        throw std::invalid_argument("apply_single: target qubit " +
                                    std::to_string(target) + " out of range");
    }
    const std::size_t mask = std::size_t{1} << target;
    const std::size_t dim = state.dimension();
    auto &amp = state.amplitudes;
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & mask) == 0) {
            const cdouble a0 = amp[i];
            const cdouble a1 = amp[i | mask];
            amp[i] = gate.m[0] * a0 + gate.m[1] * a1;
            amp[i | mask] = gate.m[2] * a0 + gate.m[3] * a1;
        }
    }
    return state;
}

/**
 * @brief Controlled-X: flips the target bit of every basis state whose control
 * bit is 1. Pure amplitude permutation, so the norm is preserved exactly.
 */
inline StateVector apply_cnot(StateVector state, int control, int target) {
    if (control < 0 || control >= state.qubit_count || target < 0 ||
        target >= state.qubit_count) {
        throw std::invalid_argument("apply_cnot: qubit index out of range");
    }
    if (control == target) {
        throw std::invalid_argument("apply_cnot: control and target must differ");
    }
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    const std::size_t dim = state.dimension();
    auto &amp = state.amplitudes;
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cmask) != 0 && (i & tmask) == 0) {
            std::swap(amp[i], amp[i | tmask]);
        }
    }
    return state;
}

/**
 * @brief Z expectation of one qubit: sum over basis states of ±|amplitude|^2,
 * +1 when the target bit is 0 and -1 when it is 1.
 *
 * Requires a normalized state (within 1e-9); returns a value in [-1, 1] up to
 * that same normalization slack. Insensitive to global phase.
 */
inline double expect_z(const StateVector &state, int target) {
    if (target < 0 || target >= state.qubit_count) {
        throw std::invalid_argument("expect_z: target qubit out of range");
    }
    if (std::abs(state.norm_squared() - 1.0) > 1e-9) {
        throw std::invalid_argument("expect_z: state is not normalized");
    }
    const std::size_t mask = std::size_t{1} << target;
    double value = 0.0;
    for (std::size_t i = 0; i < state.dimension(); ++i) {
        const double p = std::norm(state.amplitudes[i]);
        value += (i & mask) ? -p : p;
    }
    return value;
}

} // namespace qtl
