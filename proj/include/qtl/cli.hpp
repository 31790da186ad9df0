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
 * Command implementations behind the qtl binary: gen-data, train, eval,
 * effdim-sweep. The binary itself only parses flags (CLI11, with an INI
 * config file whose sections mirror the subcommands; flags win) and maps
 * exceptions to exit codes:
 *
 *   0 success, 1 usage/config error, 2 data error, 3 numerical failure.
 *
 * Every artifact a command writes embeds its resolved configuration and seed
 * as '#' comment lines, so runs are auditable and rerun-deterministic.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qtl/data.hpp"
#include "qtl/effdim.hpp"
#include "qtl/hybrid.hpp"

namespace qtl::cli {

/// FNV-1a 64-bit, printed as 16 hex digits; used as the config hash embedded
/// in checkpoints and artifact headers.
inline std::string fnv1a_hex(const std::string &text) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

inline void write_text_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + path);
    out << content;
    if (!out) throw DataError("write failed: " + path);
}

// --- gen-data ---------------------------------------------------------------

struct GenDataOptions {
    std::size_t n = 100;
    std::size_t dim = 3;
    double sigma = 0.5;
    double separation = 1.0;
    std::uint64_t seed = 0;
    std::string out;
};

inline std::string resolved_config(const GenDataOptions &o) {
    std::ostringstream s;
    s << "command=gen-data n=" << o.n << " dim=" << o.dim
      << " sigma=" << detail::format_double(o.sigma)
      << " separation=" << detail::format_double(o.separation) << " seed=" << o.seed;
    return s.str();
}

inline void run_gen_data(const GenDataOptions &options, std::ostream &log = std::cout) {
    const Dataset data =
        gen_synthetic(options.n, options.dim, options.sigma, options.separation,
                      options.seed);
    const std::vector<std::string> comments{"qtlearn synthetic dataset",
                                            "config: " + resolved_config(options)};
    save_features(data, options.out, comments);
    log << "wrote " << data.size() << " rows (" << data.class_count << " classes, "
        << data.feature_dim << " features) to " << options.out << "\n";
}

// --- train ------------------------------------------------------------------

enum class AdapterMode { Auto, On, Off };

struct TrainOptions {
    std::string data_path;
    AnsatzFamily family = AnsatzFamily::StrongEntangling;
    int layers = 3;
    int qubits = 3;
    bool reuploading = false;
    TrainConfig train;
    AdapterMode adapter = AdapterMode::Auto;
    std::string checkpoint_out;
    std::string metrics_out; // optional
};

inline std::string resolved_config(const TrainOptions &o) {
    std::ostringstream s;
    s << "command=train data=" << o.data_path << " family=" << to_string(o.family)
      << " layers=" << o.layers << " qubits=" << o.qubits
      << " reuploading=" << (o.reuploading ? 1 : 0) << " epochs=" << o.train.epochs
      << " batch=" << o.train.batch_size
      << " lr_quantum=" << detail::format_double(o.train.lr_quantum)
      << " lr_head=" << detail::format_double(o.train.lr_head)
      << " optimizer=" << (o.train.optimizer == Optimizer::Adam ? "adam" : "sgd")
      << " train_fraction=" << detail::format_double(o.train.train_fraction)
      << " train_head=" << (o.train.train_head ? 1 : 0) << " seed=" << o.train.seed;
    return s.str();
}

inline std::string metrics_row(const AnsatzSpec &spec, std::uint64_t seed,
                               const Metrics &metrics) {
    std::ostringstream row;
    row << to_string(spec.family) << ',' << spec.layers << ',' << spec.qubits << ','
        << (spec.reuploading ? 1 : 0) << ',' << seed << ','
        << detail::format_double(metrics.accuracy);
    for (double f1 : metrics.per_class_f1) row << ',' << detail::format_double(f1);
    return row.str();
}

inline std::string metrics_header(int classes) {
    std::string header = "family,layers,qubits,reupload,seed,accuracy";
    for (int c = 0; c < classes; ++c) header += ",f1_" + std::to_string(c);
    return header;
}

inline Metrics run_train(const TrainOptions &options, std::ostream &log = std::cout) {
    const Dataset data = load_features(options.data_path);
    data.validate();
    const AnsatzSpec spec =
        AnsatzSpec::make(options.family, options.layers, options.qubits,
                         options.reuploading);

    int adapter_dim = 0;
    switch (options.adapter) {
    case AdapterMode::On: adapter_dim = static_cast<int>(data.feature_dim); break;
    case AdapterMode::Off: adapter_dim = 0; break;
    case AdapterMode::Auto:
        adapter_dim = data.feature_dim == static_cast<std::size_t>(spec.feature_count())
                          ? 0
                          : static_cast<int>(data.feature_dim);
        break;
    }
    if (adapter_dim == 0 &&
        data.feature_dim != static_cast<std::size_t>(spec.feature_count())) {
        throw DataError("train: dataset has " + std::to_string(data.feature_dim) +
                        " features but the circuit expects " +
                        std::to_string(spec.feature_count()) +
                        " (enable the adapter)");
    }

    HybridModel model =
        init_model(spec, data.class_count, options.train.seed, adapter_dim);
    auto [trained, metrics] = train(model, data, options.train);

    const std::string config = resolved_config(options);
    CheckpointMeta meta;
    meta.seed = options.train.seed;
    meta.config_hash = fnv1a_hex(config);
    meta.train_fraction = options.train.train_fraction;
    meta.train_head = options.train.train_head;
    save_checkpoint(trained, meta, options.checkpoint_out);

    const std::string row = metrics_row(spec, options.train.seed, metrics);
    if (!options.metrics_out.empty()) {
        write_text_file(options.metrics_out,
                        "# config: " + config + "\n" +
                            metrics_header(data.class_count) + "\n" + row + "\n");
    }
    log << metrics_header(data.class_count) << "\n" << row << "\n";
    return metrics;
}

// --- eval -------------------------------------------------------------------

enum class EvalSplit { All, Holdout };

struct EvalOptions {
    std::string checkpoint_path;
    std::string data_path;
    EvalSplit split = EvalSplit::All;
    std::string metrics_out; // optional
};

inline std::string resolved_config(const EvalOptions &o) {
    std::ostringstream s;
    s << "command=eval checkpoint=" << o.checkpoint_path << " data=" << o.data_path
      << " split=" << (o.split == EvalSplit::All ? "all" : "holdout");
    return s.str();
}

inline Metrics run_eval(const EvalOptions &options, std::ostream &log = std::cout) {
    auto [model, meta] = load_checkpoint(options.checkpoint_path);
    const Dataset data = load_features(options.data_path);
    data.validate();
    if (data.feature_dim != model.input_dim()) {
        throw DataError("eval: dataset has " + std::to_string(data.feature_dim) +
                        " features but the model expects " +
                        std::to_string(model.input_dim()));
    }
    if (data.class_count != static_cast<int>(model.class_count())) {
        throw DataError("eval: dataset class count does not match the model");
    }

    Dataset eval_part = data;
    if (options.split == EvalSplit::Holdout) {
        if (meta.train_fraction >= 1.0) {
            throw ConfigError("eval: checkpoint was trained without a held-out split");
        }
        const auto train_count = static_cast<std::size_t>(
            std::llround(meta.train_fraction * static_cast<double>(data.size())));
        SplitSpec split_spec{train_count, data.size() - train_count, meta.seed};
        eval_part = split(data, split_spec).second;
    }

    const Metrics metrics = evaluate(model, eval_part);
    const std::string row = metrics_row(model.spec, meta.seed, metrics);
    if (!options.metrics_out.empty()) {
        write_text_file(options.metrics_out,
                        "# config: " + resolved_config(options) + "\n" +
                            metrics_header(data.class_count) + "\n" + row + "\n");
    }
    log << metrics_header(data.class_count) << "\n" << row << "\n";
    return metrics;
}

// --- effdim-sweep -----------------------------------------------------------

enum class ThetaMode { Fixed, RetrainPerN };

struct SweepOptions {
    std::string data_path;
    std::vector<AnsatzFamily> families{AnsatzFamily::RealAmplitudes,
                                       AnsatzFamily::StrongEntangling};
    int layers = 3;
    int qubits = 3;
    bool reuploading = false;
    std::vector<std::size_t> n_grid{1000, 10000, 100000, 1000000};
    double lambda = 1.0;
    double epsilon_scale = 1.05; // epsilon = epsilon_scale / sqrt(n)
    int samples = 256;
    std::uint64_t seed = 0;
    ThetaMode theta_mode = ThetaMode::Fixed;
    bool train_theta = true; // false: keep the random initialization as theta*
    TrainConfig train;       // used when training theta*
    std::string out;
};

inline std::string resolved_config(const SweepOptions &o) {
    std::ostringstream s;
    s << "command=effdim-sweep data=" << o.data_path << " families=";
    for (std::size_t i = 0; i < o.families.size(); ++i) {
        if (i) s << '+';
        s << to_string(o.families[i]);
    }
    s << " layers=" << o.layers << " qubits=" << o.qubits
      << " reuploading=" << (o.reuploading ? 1 : 0) << " n_grid=";
    for (std::size_t i = 0; i < o.n_grid.size(); ++i) {
        if (i) s << '+';
        s << o.n_grid[i];
    }
    s << " lambda=" << detail::format_double(o.lambda)
      << " epsilon_scale=" << detail::format_double(o.epsilon_scale)
      << " samples=" << o.samples << " seed=" << o.seed << " theta_mode="
      << (o.theta_mode == ThetaMode::Fixed ? "fixed" : "retrain-per-n")
      << " train_theta=" << (o.train_theta ? 1 : 0);
    return s.str();
}

inline EffDimConfig sweep_point_config(const SweepOptions &options, std::size_t n) {
    EffDimConfig config;
    config.n = n;
    config.lambda = options.lambda;
    config.epsilon = options.epsilon_scale / std::sqrt(static_cast<double>(n));
    config.samples = options.samples;
    config.seed = options.seed;
    config.validate();
    return config;
}

inline constexpr const char *kSweepHeader =
    "family,layers,qubits,reupload,n,lambda,epsilon,samples,seed,d,effdim,"
    "normalized,theta_mode";

namespace detail_sweep {

/// theta* for one family: trained on `rows_for_theta` when requested,
/// otherwise the seeded random initialization (with the scaler still fit so
/// the encoding is well defined).
inline HybridModel prepare_model(const SweepOptions &options, const AnsatzSpec &spec,
                                 const Dataset &data) {
    const int adapter_dim =
        data.feature_dim == static_cast<std::size_t>(spec.feature_count())
            ? 0
            : static_cast<int>(data.feature_dim);
    HybridModel model =
        init_model(spec, data.class_count, options.seed, adapter_dim);
    if (options.train_theta) {
        TrainConfig tc = options.train;
        tc.seed = options.seed;
        tc.batch_size = static_cast<int>(std::min<std::size_t>(
            static_cast<std::size_t>(tc.batch_size), data.size()));
        return train(model, data, tc).first;
    }
    model.scaler = AngleScaler::fit(data);
    return model;
}

/// Deterministic subsample of min(n, |data|) rows for retrain-per-n mode.
inline Dataset subsample(const Dataset &data, std::size_t n, std::uint64_t seed) {
    if (n >= data.size()) return data;
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    Dataset out{.rows = {}, .class_count = data.class_count, .feature_dim = data.feature_dim};
    for (std::size_t i = 0; i < n; ++i) out.rows.push_back(data.rows[order[i]]);
    return out;
}

} // namespace detail_sweep

struct SweepRow {
    AnsatzSpec spec;
    EffDimReport report;
};

/**
 * @brief One EffDimReport per (family, n) grid point. All grid configs are
 * validated before any Fisher computation starts. Rows are ordered
 * family-major, n ascending.
 */
inline std::vector<SweepRow> run_effdim_sweep(const SweepOptions &options,
                                              std::ostream &log = std::cout) {
    const Dataset data = load_features(options.data_path);
    data.validate();
    if (options.families.empty()) throw ConfigError("effdim-sweep: no families given");
    if (options.n_grid.empty()) throw ConfigError("effdim-sweep: empty n grid");
    for (std::size_t n : options.n_grid) sweep_point_config(options, n); // fail fast

    const std::string theta_mode_name =
        options.theta_mode == ThetaMode::Fixed ? "fixed" : "retrain-per-n";

    std::vector<SweepRow> rows;
    for (AnsatzFamily family : options.families) {
        const AnsatzSpec spec = AnsatzSpec::make(family, options.layers,
                                                 options.qubits, options.reuploading);
        HybridModel fixed_model;
        if (options.theta_mode == ThetaMode::Fixed) {
            fixed_model = detail_sweep::prepare_model(options, spec, data);
        }
        for (std::size_t n : options.n_grid) {
            const EffDimConfig config = sweep_point_config(options, n);
            HybridModel model =
                options.theta_mode == ThetaMode::Fixed
                    ? fixed_model
                    : detail_sweep::prepare_model(
                          options, spec, detail_sweep::subsample(data, n, options.seed));
            EffDimReport report = local_effective_dimension(
                model, model.free_parameters(), data, config);
            report.theta_mode = theta_mode_name;
            log << to_string(family) << " n=" << n
                << " effdim=" << report.effective_dimension
                << " normalized=" << report.normalized
                << (report.degenerate ? " (degenerate)" : "") << "\n";
            rows.push_back(SweepRow{spec, std::move(report)});
        }
    }

    if (!options.out.empty()) {
        std::ostringstream text;
        text << "# qtlearn effective-dimension sweep\n";
        text << "# config: " << resolved_config(options) << "\n";
        text << kSweepHeader << "\n";
        for (const SweepRow &row : rows) {
            text << to_string(row.spec.family) << ',' << row.spec.layers << ','
                 << row.spec.qubits << ',' << (row.spec.reuploading ? 1 : 0) << ','
                 << row.report.to_row() << ',' << row.report.theta_mode << "\n";
        }
        write_text_file(options.out, text.str());
    }
    return rows;
}

} // namespace qtl::cli
