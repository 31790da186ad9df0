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
 * Analytic parameter-shift gradients of circuit expectations, plus the
 * central-finite-difference oracle they are tested against.
 *
 * Every trainable angle in gate_v and every feature angle in gate_u enters
 * with a full-angle generator of eigenvalues ±1, so expectations are
 * frequency-2 trigonometric polynomials in each angle and the exact
 * derivative is f(p + pi/4) - f(p - pi/4) with coefficient 1 (not the
 * half-angle convention's pi/2 shift and 1/2 factor).
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "qtl/ansatz.hpp"
#include "qtl/matrix.hpp"

namespace qtl {

inline constexpr double kParamShift = std::numbers::pi / 4.0;

namespace detail {

/// Location of each free parameter in the instruction list. Each free
/// parameter occurs in exactly one gate.
inline std::vector<AngleShift> free_param_sites(const CircuitProgram &program) {
    std::vector<AngleShift> sites(static_cast<std::size_t>(program.free_param_count));
    for (std::ptrdiff_t idx = 0; idx < std::ssize(program.instructions); ++idx) {
        if (const auto *p = std::get_if<ParamGate>(&program.instructions[idx])) {
            for (int s = 0; s < 3; ++s) {
                const int pi = p->param_index[s];
                if (pi != kFixedZero) sites[pi] = AngleShift{idx, s, 0.0};
            }
        }
    }
    return sites;
}

} // namespace detail

/**
 * @brief Jacobian d<Z_q>/d(theta_p) of all per-qubit expectations with respect
 * to all free parameters, via the parameter-shift rule. Row q, column p.
 */
inline Mat expectation_jacobian(const CircuitProgram &program,
                                std::span<const double> free_params,
                                std::span<const double> features) {
    Mat jac(program.qubit_count, program.free_param_count);
    auto sites = detail::free_param_sites(program);
    for (int p = 0; p < program.free_param_count; ++p) {
        detail::AngleShift shift = sites[p];
        shift.delta = kParamShift;
        const auto plus = forward_shifted(program, free_params, features, shift);
        shift.delta = -kParamShift;
        const auto minus = forward_shifted(program, free_params, features, shift);
        for (int q = 0; q < program.qubit_count; ++q) {
            jac.at(q, p) = plus[q] - minus[q];
        }
    }
    return jac;
}

/**
 * @brief Parameter-shift gradient of one qubit's Z expectation:
 * d<Z_observable>/d(theta_p) = f(p + pi/4) - f(p - pi/4) per free parameter.
 */
inline std::vector<double> shift_rule_grad(const CircuitProgram &program,
                                           std::span<const double> free_params,
                                           std::span<const double> features,
                                           int observable) {
    if (observable < 0 || observable >= program.qubit_count) {
        throw std::invalid_argument("shift_rule_grad: observable qubit out of range");
    }
    std::vector<double> grad(static_cast<std::size_t>(program.free_param_count));
    auto sites = detail::free_param_sites(program);
    for (int p = 0; p < program.free_param_count; ++p) {
        detail::AngleShift shift = sites[p];
        shift.delta = kParamShift;
        const double plus = forward_shifted(program, free_params, features, shift)[observable];
        shift.delta = -kParamShift;
        const double minus = forward_shifted(program, free_params, features, shift)[observable];
        grad[p] = plus - minus;
    }
    return grad;
}

inline std::vector<double> shift_rule_grad(const CircuitProgram &program,
                                           const ParamTensor &params,
                                           std::span<const double> features,
                                           int observable) {
    if (!program.source_spec) {
        throw std::invalid_argument("shift_rule_grad: program has no source spec");
    }
    const auto free = to_free_params(*program.source_spec, params);
    return shift_rule_grad(program, free, features, observable);
}

/**
 * @brief Central finite differences (f(p+h) - f(p-h)) / 2h per free parameter.
 * Independent oracle for the shift rule; h must lie in [1e-7, 1e-3].
 */
inline std::vector<double> finite_diff_grad(const CircuitProgram &program,
                                            std::span<const double> free_params,
                                            std::span<const double> features,
                                            int observable, double h = 1e-5) {
    if (observable < 0 || observable >= program.qubit_count) {
        throw std::invalid_argument("finite_diff_grad: observable qubit out of range");
    }
    if (!(h >= 1e-7 && h <= 1e-3)) {
        throw std::invalid_argument("finite_diff_grad: step must be in [1e-7, 1e-3]");
    }
    std::vector<double> shifted(free_params.begin(), free_params.end());
    std::vector<double> grad(static_cast<std::size_t>(program.free_param_count));
    for (int p = 0; p < program.free_param_count; ++p) {
        const double saved = shifted[p];
        shifted[p] = saved + h;
        const double plus = forward(program, shifted, features)[observable];
        shifted[p] = saved - h;
        const double minus = forward(program, shifted, features)[observable];
        shifted[p] = saved;
        grad[p] = (plus - minus) / (2.0 * h);
    }
    return grad;
}

inline std::vector<double> finite_diff_grad(const CircuitProgram &program,
                                            const ParamTensor &params,
                                            std::span<const double> features,
                                            int observable, double h = 1e-5) {
    if (!program.source_spec) {
        throw std::invalid_argument("finite_diff_grad: program has no source spec");
    }
    const auto free = to_free_params(*program.source_spec, params);
    return finite_diff_grad(program, free, features, observable, h);
}

/**
 * @brief Jacobian d<Z_q>/d(feature_s) via per-occurrence parameter shifts.
 *
 * A re-uploaded feature slot appears in several gates; the total derivative is
 * the sum of single-occurrence shift-rule terms. Needed to train a classical
 * adapter feeding the encoding angles.
 */
inline Mat feature_jacobian(const CircuitProgram &program,
                            std::span<const double> free_params,
                            std::span<const double> features) {
    Mat jac(program.qubit_count, program.feature_count);
    for (std::ptrdiff_t idx = 0; idx < std::ssize(program.instructions); ++idx) {
        const auto *f = std::get_if<FeatureGate>(&program.instructions[idx]);
        if (f == nullptr) continue;
        detail::AngleShift shift{idx, 0, kParamShift};
        const auto plus = forward_shifted(program, free_params, features, shift);
        shift.delta = -kParamShift;
        const auto minus = forward_shifted(program, free_params, features, shift);
        for (int q = 0; q < program.qubit_count; ++q) {
            jac.at(q, f->slot) += plus[q] - minus[q];
        }
    }
    return jac;
}

} // namespace qtl
