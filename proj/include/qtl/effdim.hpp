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
 * Empirical Fisher information, its trace normalization, and Monte Carlo
 * estimation of the local effective dimension
 *
 *     d_{n,l} = 2 log( (1/V_eps) \int_{B_eps} sqrt(det(I + k Fbar)) dtheta )
 *               / log k,      k = lambda n / (2 pi log n),
 *
 * where Fbar is the Fisher matrix rescaled so its mean trace over the
 * epsilon-ball equals the free-parameter count d. The ball integral is the
 * plain mean over uniform ball samples (the ball volume cancels) with
 * log-sum-exp stabilization of the half-log-determinants.
 *
 * All routines are templates over a model type exposing
 *   parameter_count(), class_count(),
 *   probabilities(theta, features) and log_prob_gradients(theta, features);
 * HybridModel is the primary such type.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qtl/data.hpp"
#include "qtl/errors.hpp"
#include "qtl/hybrid.hpp"

namespace qtl {

/// d x d empirical Fisher information (symmetric, positive semidefinite up to
/// rounding). `floored_terms` counts probabilities that hit the 1e-12 floor
/// while the matrix was accumulated.
struct FisherMatrix {
    int dim = 0;
    std::vector<double> entries; // row-major d x d
    int floored_terms = 0;

    FisherMatrix() = default;
    explicit FisherMatrix(int d)
        : dim(d), entries(static_cast<std::size_t>(d) * static_cast<std::size_t>(d), 0.0) {}

    double &at(int r, int c) { return entries[static_cast<std::size_t>(r) * dim + c]; }
    double at(int r, int c) const { return entries[static_cast<std::size_t>(r) * dim + c]; }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < dim; ++i) t += at(i, i);
        return t;
    }

    Eigen::Map<const Eigen::MatrixXd> as_eigen() const {
        return {entries.data(), dim, dim}; // symmetric, so storage order is moot
    }

    /// Eigenvalues in ascending order (symmetric eigendecomposition).
    std::vector<double> eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(as_eigen(),
                                                              Eigen::EigenvaluesOnly);
        const auto &ev = solver.eigenvalues();
        return {ev.data(), ev.data() + ev.size()};
    }
};

/**
 * @brief Monte Carlo settings for the local effective dimension.
 *
 * n is the (virtual) training-set size entering k and the default ball
 * radius; lambda must lie in (2 pi log n / n, 1], which also guarantees
 * k > 1; epsilon must exceed 1/sqrt(n).
 */
struct EffDimConfig {
    std::size_t n = 1000;
    double lambda = 1.0;
    double epsilon = 0.0;
    int samples = 256;
    std::uint64_t seed = 0;

    static EffDimConfig defaults(std::size_t n, std::uint64_t seed = 0) {
        EffDimConfig config;
        config.n = n;
        config.lambda = 1.0;
        config.epsilon = 1.05 / std::sqrt(static_cast<double>(n));
        config.samples = 256;
        config.seed = seed;
        config.validate();
        return config;
    }

    double lambda_floor() const {
        return 2.0 * std::numbers::pi * std::log(static_cast<double>(n)) /
               static_cast<double>(n);
    }

    double k() const {
        return lambda * static_cast<double>(n) /
               (2.0 * std::numbers::pi * std::log(static_cast<double>(n)));
    }

    void validate() const {
        if (n < 8) throw ConfigError("effdim: n must be >= 8");
        const double floor = lambda_floor();
        if (floor >= 1.0) {
            throw ConfigError("effdim: n=" + std::to_string(n) +
                              " leaves no admissible lambda (2 pi log n / n >= 1)");
        }
        if (!(lambda > floor && lambda <= 1.0)) {
            throw ConfigError("effdim: lambda must lie in (2 pi log n / n, 1]");
        }
        if (!(epsilon > 1.0 / std::sqrt(static_cast<double>(n)))) {
            throw ConfigError("effdim: epsilon must exceed 1/sqrt(n)");
        }
        if (samples < 16) throw ConfigError("effdim: samples must be >= 16");
        if (!(k() > 1.0)) throw ConfigError("effdim: k must exceed 1");
    }
};

/// Result of one local-effective-dimension estimate, with per-sample
/// half-log-determinants kept for diagnostics.
struct EffDimReport {
    double effective_dimension = 0.0;
    double normalized = 0.0;
    int d = 0;
    EffDimConfig config;
    std::vector<double> half_logdets;
    bool degenerate = false;
    int floored_terms = 0;
    std::string theta_mode = "fixed";

    /// Flat delimited row: n, lambda, epsilon, M, seed, d, effdim, normalized.
    std::string to_row() const {
        std::ostringstream out;
        out << config.n << ',' << detail::format_double(config.lambda) << ','
            << detail::format_double(config.epsilon) << ',' << config.samples << ','
            << config.seed << ',' << d << ','
            << detail::format_double(effective_dimension) << ','
            << detail::format_double(normalized);
        return out.str();
    }
};

/**
 * @brief Empirical Fisher over the free quantum parameters:
 * F = (1/|data|) sum_x sum_y p(y|x; theta) s_y s_y^T with s_y the score
 * from the model. Symmetrized after accumulation.
 */
template <class Model>
FisherMatrix empirical_fisher(const Model &model, std::span<const double> theta,
                              const Dataset &data) {
    if (data.rows.empty()) throw std::invalid_argument("empirical_fisher: empty dataset");
    const int d = static_cast<int>(model.parameter_count());
    if (theta.size() != static_cast<std::size_t>(d)) {
        throw std::invalid_argument("empirical_fisher: theta length mismatch");
    }
    FisherMatrix fisher(d);
    const double inv_rows = 1.0 / static_cast<double>(data.rows.size());
    for (const DataRow &row : data.rows) {
        const auto probs = model.probabilities(theta, row.features);
        const Mat scores = model.log_prob_gradients(theta, row.features);
        for (std::size_t y = 0; y < probs.size(); ++y) {
            double py = probs[y];
            if (py < 1e-12) {
                py = 1e-12;
                ++fisher.floored_terms;
            }
            const double w = py * inv_rows;
            for (int i = 0; i < d; ++i) {
                const double si = scores.at(static_cast<int>(y), i);
                for (int j = i; j < d; ++j) {
                    fisher.at(i, j) += w * si * scores.at(static_cast<int>(y), j);
                }
            }
        }
    }
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) fisher.at(j, i) = fisher.at(i, j);
    }
    return fisher;
}

/**
 * @brief Trace normalization over ball samples: every matrix is scaled by
 * d / mean(Tr F), so the mean output trace equals d. Throws
 * DegenerateModelError when every trace vanishes.
 */
inline std::vector<FisherMatrix> normalize_fisher(std::vector<FisherMatrix> fishers,
                                                  int d) {
    if (fishers.empty()) throw std::invalid_argument("normalize_fisher: no samples");
    double mean_trace = 0.0;
    for (const FisherMatrix &f : fishers) mean_trace += f.trace();
    mean_trace /= static_cast<double>(fishers.size());
    if (!(mean_trace > 1e-300)) {
        throw DegenerateModelError(
            "normalize_fisher: Fisher trace is zero for every sample");
    }
    const double scale = static_cast<double>(d) / mean_trace;
    for (FisherMatrix &f : fishers) {
        for (double &e : f.entries) e *= scale;
    }
    return fishers;
}

/**
 * @brief M points uniform in the Euclidean d-ball of radius epsilon around
 * theta_star (Gaussian direction, radius epsilon * u^(1/d)). Deterministic
 * under the seed.
 */
inline std::vector<std::vector<double>> sample_epsilon_ball(
    std::span<const double> theta_star, double epsilon, int count,
    std::uint64_t seed) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("sample_epsilon_ball: epsilon must be > 0");
    if (count < 1) throw std::invalid_argument("sample_epsilon_ball: count must be >= 1");
    const std::size_t d = theta_star.size();
    if (d == 0) throw std::invalid_argument("sample_epsilon_ball: empty center");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> points;
    points.reserve(static_cast<std::size_t>(count));
    for (int m = 0; m < count; ++m) {
        std::vector<double> direction(d);
        double norm_sq = 0.0;
        do {
            norm_sq = 0.0;
            for (double &x : direction) {
                x = gauss(rng);
                norm_sq += x * x;
            }
        } while (norm_sq == 0.0);
        const double radius =
            epsilon * std::pow(unit(rng), 1.0 / static_cast<double>(d));
        const double scale = radius / std::sqrt(norm_sq);
        std::vector<double> point(d);
        for (std::size_t i = 0; i < d; ++i) point[i] = theta_star[i] + scale * direction[i];
        points.push_back(std::move(point));
    }
    return points;
}

/**
 * @brief Monte Carlo local effective dimension around theta_star.
 *
 * Per ball sample: empirical Fisher, trace normalization (shared across
 * samples), then 1/2 log det(I + k Fbar) through a symmetric
 * eigendecomposition with eigenvalues clamped at 0. The sample mean is taken
 * in log space. A degenerate model (identically zero Fisher) reports 0 with
 * its flag set rather than failing.
 */
template <class Model>
EffDimReport local_effective_dimension(const Model &model,
                                       std::span<const double> theta_star,
                                       const Dataset &data,
                                       const EffDimConfig &config) {
    config.validate();
    const int d = static_cast<int>(model.parameter_count());
    if (theta_star.size() != static_cast<std::size_t>(d)) {
        throw std::invalid_argument("local_effective_dimension: theta length mismatch");
    }

    EffDimReport report;
    report.d = d;
    report.config = config;

    const auto points =
        sample_epsilon_ball(theta_star, config.epsilon, config.samples, config.seed);
    std::vector<FisherMatrix> fishers;
    fishers.reserve(points.size());
    for (const auto &theta : points) {
        fishers.push_back(empirical_fisher(model, theta, data));
        report.floored_terms += fishers.back().floored_terms;
    }

    try {
        fishers = normalize_fisher(std::move(fishers), d);
    } catch (const DegenerateModelError &) {
        report.degenerate = true;
        report.effective_dimension = 0.0;
        report.normalized = 0.0;
        report.half_logdets.assign(points.size(), 0.0);
        return report;
    }

    const double k = config.k();
    report.half_logdets.reserve(fishers.size());
    for (const FisherMatrix &f : fishers) {
        double half_logdet = 0.0;
        for (double ev : f.eigenvalues()) {
            const double term = std::max(1.0 + k * std::max(ev, 0.0), 1e-300);
            half_logdet += 0.5 * std::log(term);
        }
        report.half_logdets.push_back(half_logdet);
    }

    // log-mean-exp of the half-log-determinants
    const double top =
        *std::max_element(report.half_logdets.begin(), report.half_logdets.end());
    double acc = 0.0;
    for (double s : report.half_logdets) acc += std::exp(s - top);
    const double log_mean =
        top + std::log(acc) - std::log(static_cast<double>(report.half_logdets.size()));

    report.effective_dimension = 2.0 * log_mean / std::log(k);
    report.normalized = report.effective_dimension / static_cast<double>(d);
    return report;
}

} // namespace qtl
