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

// Test-only brute-force oracle: gates embedded as explicit Kronecker-product
// matrices and circuits as dense matrix chains. Deliberately independent of
// the strided-update execution path it checks.

#pragma once

#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include "qtl/ansatz.hpp"
#include "qtl/statevec.hpp"

namespace oracle {

using qtl::cdouble;

struct CMat {
    std::size_t dim = 0;
    std::vector<cdouble> m; // row-major dim x dim

    explicit CMat(std::size_t d) : dim(d), m(d * d, cdouble{0.0, 0.0}) {}

    cdouble &at(std::size_t r, std::size_t c) { return m[r * dim + c]; }
    cdouble at(std::size_t r, std::size_t c) const { return m[r * dim + c]; }

    static CMat identity(std::size_t d) {
        CMat out(d);
        for (std::size_t i = 0; i < d; ++i) out.at(i, i) = 1.0;
        return out;
    }
};

inline CMat kron(const CMat &a, const CMat &b) {
    CMat out(a.dim * b.dim);
    for (std::size_t ra = 0; ra < a.dim; ++ra)
        for (std::size_t ca = 0; ca < a.dim; ++ca)
            for (std::size_t rb = 0; rb < b.dim; ++rb)
                for (std::size_t cb = 0; cb < b.dim; ++cb)
                    out.at(ra * b.dim + rb, ca * b.dim + cb) = a.at(ra, ca) * b.at(rb, cb);
    return out;
}

inline CMat matmul(const CMat &a, const CMat &b) {
    CMat out(a.dim);
    for (std::size_t r = 0; r < a.dim; ++r)
        for (std::size_t k = 0; k < a.dim; ++k) {
            const cdouble v = a.at(r, k);
            if (v == cdouble{0.0, 0.0}) continue;
            for (std::size_t c = 0; c < a.dim; ++c) out.at(r, c) += v * b.at(k, c);
        }
    return out;
}

inline std::vector<cdouble> matvec(const CMat &a, const std::vector<cdouble> &v) {
    std::vector<cdouble> out(a.dim, cdouble{0.0, 0.0});
    for (std::size_t r = 0; r < a.dim; ++r)
        for (std::size_t c = 0; c < a.dim; ++c) out[r] += a.at(r, c) * v[c];
    return out;
}

// Single-qubit gate on `target` of a q-qubit register, qubit 0 = LSB:
// I_{2^(q-1-target)} (x) G (x) I_{2^target}.
inline CMat embed_single(int qubits, int target, const qtl::Gate2x2 &gate) {
    CMat g(2);
    g.at(0, 0) = gate.m[0];
    g.at(0, 1) = gate.m[1];
    g.at(1, 0) = gate.m[2];
    g.at(1, 1) = gate.m[3];
    CMat low = CMat::identity(std::size_t{1} << target);
    CMat high = CMat::identity(std::size_t{1} << (qubits - 1 - target));
    return kron(high, kron(g, low));
}

// Controlled-X permutation matrix built straight from the bit rule.
inline CMat cnot_matrix(int qubits, int control, int target) {
    const std::size_t dim = std::size_t{1} << qubits;
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    CMat out(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        const std::size_t i = (j & cmask) ? (j ^ tmask) : j;
        out.at(i, j) = 1.0;
    }
    return out;
}

// Full circuit unitary: instruction matrices multiplied in temporal order
// (later instructions on the left).
inline CMat program_unitary(const qtl::CircuitProgram &program,
                            std::span<const double> free_params,
                            std::span<const double> features) {
    CMat total = CMat::identity(std::size_t{1} << program.qubit_count);
    for (const qtl::Instruction &ins : program.instructions) {
        CMat step(0);
        if (const auto *f = std::get_if<qtl::FeatureGate>(&ins)) {
            step = embed_single(program.qubit_count, f->qubit,
                                qtl::gate_u(features[f->slot]));
        } else if (const auto *p = std::get_if<qtl::ParamGate>(&ins)) {
            std::array<double, 3> angles{};
            for (int s = 0; s < 3; ++s) {
                angles[s] = p->param_index[s] == qtl::kFixedZero
                                ? 0.0
                                : free_params[p->param_index[s]];
            }
            step = embed_single(program.qubit_count, p->qubit,
                                qtl::gate_v(angles[0], angles[1], angles[2]));
        } else {
            const auto &e = std::get<qtl::EntanglerGate>(ins);
            step = cnot_matrix(program.qubit_count, e.control, e.target);
        }
        total = matmul(step, total);
    }
    return total;
}

inline std::vector<double> expectations_of(const std::vector<cdouble> &amplitudes,
                                           int qubits) {
    std::vector<double> z(static_cast<std::size_t>(qubits), 0.0);
    for (int q = 0; q < qubits; ++q) {
        const std::size_t mask = std::size_t{1} << q;
        for (std::size_t i = 0; i < amplitudes.size(); ++i) {
            const double p = std::norm(amplitudes[i]);
            z[static_cast<std::size_t>(q)] += (i & mask) ? -p : p;
        }
    }
    return z;
}

// Forward pass via the dense matrix chain from |0...0>.
inline std::vector<double> forward_via_unitary(const qtl::CircuitProgram &program,
                                               std::span<const double> free_params,
                                               std::span<const double> features) {
    const CMat u = program_unitary(program, free_params, features);
    std::vector<cdouble> state(u.dim, cdouble{0.0, 0.0});
    state[0] = 1.0;
    return expectations_of(matvec(u, state), program.qubit_count);
}

inline std::vector<double> random_angles(std::mt19937_64 &rng, std::size_t count,
                                         double lo = 0.0, double hi = 6.283185307179586) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> out(count);
    for (double &v : out) v = dist(rng);
    return out;
}

inline qtl::StateVector random_state(std::mt19937_64 &rng, int qubits) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    qtl::StateVector state = qtl::new_zero_state(qubits);
    double norm_sq = 0.0;
    for (cdouble &a : state.amplitudes) {
        a = cdouble{gauss(rng), gauss(rng)};
        norm_sq += std::norm(a);
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (cdouble &a : state.amplitudes) a *= inv;
    return state;
}

} // namespace oracle
