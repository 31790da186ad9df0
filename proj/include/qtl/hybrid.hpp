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
 * The classic-quantum-classic classifier: an optional affine+ReLU adapter
 * mapping incoming feature vectors to encoding angles, the parametrized
 * circuit, and a softmax head over the per-qubit Z expectations. Includes
 * mini-batch training (Adam or SGD), evaluation metrics and a structured-text
 * checkpoint format.
 *
 * The upstream convolutional feature extractor is deliberately absent; this
 * model consumes pre-extracted feature vectors (see data.hpp for the file
 * contract).
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qtl/ansatz.hpp"
#include "qtl/data.hpp"
#include "qtl/grad.hpp"
#include "qtl/matrix.hpp"

namespace qtl {

/// Affine layer with softmax activation over C classes; input is the
/// qubit-count-long expectation vector.
struct ClassicalHead {
    Mat weights; // C x q
    std::vector<double> biases;

    int class_count() const { return weights.rows; }

    bool operator==(const ClassicalHead &) const = default;
};

/// Trainable affine+ReLU adapter turning a raw feature vector into encoding
/// angles. Enabled when the incoming feature dimension does not match the
/// circuit's feature count (typical for feature-file pipelines).
struct AdapterLayer {
    Mat weights; // angle_count x input_dim
    std::vector<double> biases;

    int input_dim() const { return weights.cols; }
    int output_dim() const { return weights.rows; }

    std::vector<double> pre_activations(std::span<const double> input) const {
        if (std::ssize(input) != weights.cols) {
            throw std::invalid_argument("adapter: input dimension mismatch");
        }
        std::vector<double> pre(static_cast<std::size_t>(weights.rows));
        for (int r = 0; r < weights.rows; ++r) {
            double acc = biases[static_cast<std::size_t>(r)];
            for (int c = 0; c < weights.cols; ++c) acc += weights.at(r, c) * input[c];
            pre[static_cast<std::size_t>(r)] = acc;
        }
        return pre;
    }

    bool operator==(const AdapterLayer &) const = default;
};

inline std::vector<double> softmax(std::span<const double> logits) {
    const double top = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - top);
        total += p[i];
    }
    for (double &v : p) v /= total;
    return p;
}

/**
 * @brief AnsatzSpec + ParamTensor + ClassicalHead (+ optional adapter and
 * feature scaler picked up during training).
 */
struct HybridModel {
    AnsatzSpec spec;
    CircuitProgram program;
    ParamTensor params;
    ClassicalHead head;
    std::optional<AdapterLayer> adapter;
    std::optional<AngleScaler> scaler;

    std::size_t parameter_count() const {
        return static_cast<std::size_t>(spec.free_param_count());
    }
    std::size_t class_count() const {
        return static_cast<std::size_t>(head.class_count());
    }
    std::size_t input_dim() const {
        if (adapter) return static_cast<std::size_t>(adapter->input_dim());
        return static_cast<std::size_t>(spec.feature_count());
    }

    /// Raw features -> encoding angles (scaler, then adapter if present).
    std::vector<double> encode(std::span<const double> raw) const {
        std::vector<double> scaled = scaler ? scaler->transform_row(raw)
                                            : std::vector<double>(raw.begin(), raw.end());
        if (!adapter) {
            if (std::ssize(scaled) != spec.feature_count()) {
                throw std::invalid_argument("model: feature dimension mismatch");
            }
            return scaled;
        }
        std::vector<double> angles = adapter->pre_activations(scaled);
        for (double &a : angles) a = std::max(a, 0.0);
        return angles;
    }

    std::vector<double> expectations(std::span<const double> theta_free,
                                     std::span<const double> raw) const {
        const auto angles = encode(raw);
        return forward(program, theta_free, angles);
    }

    std::vector<double> head_logits(std::span<const double> z) const {
        std::vector<double> logits(static_cast<std::size_t>(head.class_count()));
        for (int l = 0; l < head.class_count(); ++l) {
            double acc = head.biases[static_cast<std::size_t>(l)];
            for (int q = 0; q < head.weights.cols; ++q) acc += head.weights.at(l, q) * z[static_cast<std::size_t>(q)];
            logits[static_cast<std::size_t>(l)] = acc;
        }
        return logits;
    }

    /// Class probabilities at externally supplied quantum parameters.
    std::vector<double> probabilities(std::span<const double> theta_free,
                                      std::span<const double> raw) const {
        return softmax(head_logits(expectations(theta_free, raw)));
    }

    /// Class probabilities at this model's own parameters.
    std::vector<double> probabilities(std::span<const double> raw) const {
        const auto free = to_free_params(spec, params);
        return probabilities(free, raw);
    }

    std::vector<double> free_parameters() const { return to_free_params(spec, params); }

    /**
     * @brief Score matrix: row y holds the gradient of log p(y|x) with respect
     * to the free quantum parameters. With a softmax head the scores are
     * (e_y - p)^T W J, which stays bounded even for vanishing probabilities.
     */
    Mat log_prob_gradients(std::span<const double> theta_free,
                           std::span<const double> raw) const {
        const auto angles = encode(raw);
        const auto z = forward(program, theta_free, angles);
        const auto p = softmax(head_logits(z));
        const Mat jac = expectation_jacobian(program, theta_free, angles); // q x d
        const int classes = head.class_count();
        const int d = program.free_param_count;
        Mat scores(classes, d);
        for (int y = 0; y < classes; ++y) {
            // u = W^T (e_y - p), length q
            for (int par = 0; par < d; ++par) {
                double acc = 0.0;
                for (int q = 0; q < head.weights.cols; ++q) {
                    double u = 0.0;
                    for (int l = 0; l < classes; ++l) {
                        const double delta = (l == y ? 1.0 : 0.0) - p[static_cast<std::size_t>(l)];
                        u += delta * head.weights.at(l, q);
                    }
                    acc += u * jac.at(q, par);
                }
                scores.at(y, par) = acc;
            }
        }
        return scores;
    }
};

/// Spec op wrapper: class probabilities of any model implementing
/// probabilities(features) at its own parameters.
template <class Model>
std::vector<double> model_probabilities(const Model &model,
                                        std::span<const double> features) {
    return model.probabilities(features);
}

/**
 * @brief Fresh model: quantum params uniform in [0, 2pi), head weights
 * uniform in [-0.1, 0.1], head biases zero, deterministic under the seed.
 * `adapter_input_dim` > 0 attaches an adapter (weights uniform in
 * [-0.1, 0.1], biases pi/2 so the ReLU starts in its active region).
 */
inline HybridModel init_model(const AnsatzSpec &spec, int classes,
                              std::uint64_t seed, int adapter_input_dim = 0) {
    spec.validate();
    if (classes < 2) throw std::invalid_argument("init_model: need at least 2 classes");
    HybridModel model;
    model.spec = spec;
    model.program = build(spec);
    model.params = ParamTensor::zeros(spec);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> small(-0.1, 0.1);

    const bool rotation_only = spec.family == AnsatzFamily::RealAmplitudes;
    for (int l = 0; l < spec.layers; ++l) {
        for (int q = 0; q < spec.qubits; ++q) {
            if (!rotation_only) {
                model.params.at(l, q, 0) = angle(rng);
                model.params.at(l, q, 1) = angle(rng);
            }
            model.params.at(l, q, 2) = angle(rng);
        }
    }

    model.head.weights = Mat(classes, spec.qubits);
    model.head.biases.assign(static_cast<std::size_t>(classes), 0.0);
    for (double &w : model.head.weights.data) w = small(rng);

    if (adapter_input_dim > 0) {
        AdapterLayer adapter;
        adapter.weights = Mat(spec.feature_count(), adapter_input_dim);
        adapter.biases.assign(static_cast<std::size_t>(spec.feature_count()),
                              std::numbers::pi / 2.0);
        for (double &w : adapter.weights.data) w = small(rng);
        model.adapter = std::move(adapter);
    }
    return model;
}

/// Argmax prediction; ties break toward the lowest class index.
inline std::pair<int, std::vector<double>> predict(const HybridModel &model,
                                                   std::span<const double> raw) {
    auto probs = model.probabilities(raw);
    int best = 0;
    for (int c = 1; c < static_cast<int>(probs.size()); ++c) {
        if (probs[static_cast<std::size_t>(c)] > probs[static_cast<std::size_t>(best)]) best = c;
    }
    return {best, std::move(probs)};
}

enum class Optimizer { Adam, Sgd };

struct TrainConfig {
    int epochs = 20;
    int batch_size = 64;
    double lr_quantum = 0.05;
    double lr_head = 0.01;
    Optimizer optimizer = Optimizer::Adam;
    std::uint64_t seed = 0;
    double train_fraction = 0.7;
    bool train_head = true; // false: only the quantum layer is updated
};

struct Metrics {
    double accuracy = 0.0;
    std::vector<double> per_class_f1;
    std::vector<double> loss_history;
    // mean L2 norm of the quantum-parameter gradient per epoch; diagnostic
    // for vanishing gradients in deep circuits
    std::vector<double> grad_norm_history;
};

/// Accuracy and one-vs-rest F1 from label/prediction pairs. F1 is 0 for a
/// class with no true and no predicted members.
inline Metrics metrics_from_predictions(std::span<const int> truth,
                                        std::span<const int> predicted,
                                        int classes) {
    if (truth.size() != predicted.size() || truth.empty()) {
        throw std::invalid_argument("metrics: need matching nonempty label vectors");
    }
    Metrics m;
    std::size_t correct = 0;
    std::vector<std::size_t> tp(static_cast<std::size_t>(classes), 0);
    std::vector<std::size_t> fp(static_cast<std::size_t>(classes), 0);
    std::vector<std::size_t> fn(static_cast<std::size_t>(classes), 0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == predicted[i]) {
            ++correct;
            ++tp[static_cast<std::size_t>(truth[i])];
        } else {
            ++fp[static_cast<std::size_t>(predicted[i])];
            ++fn[static_cast<std::size_t>(truth[i])];
        }
    }
    m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
    m.per_class_f1.resize(static_cast<std::size_t>(classes));
    for (int c = 0; c < classes; ++c) {
        const auto k = static_cast<std::size_t>(c);
        const double denom = static_cast<double>(2 * tp[k] + fp[k] + fn[k]);
        m.per_class_f1[k] = denom > 0.0 ? 2.0 * static_cast<double>(tp[k]) / denom : 0.0;
    }
    return m;
}

inline Metrics evaluate(const HybridModel &model, const Dataset &data) {
    if (data.rows.empty()) throw std::invalid_argument("evaluate: empty dataset");
    std::vector<int> truth, predicted;
    truth.reserve(data.size());
    predicted.reserve(data.size());
    for (const DataRow &row : data.rows) {
        truth.push_back(row.label);
        predicted.push_back(predict(model, row.features).first);
    }
    return metrics_from_predictions(truth, predicted, data.class_count);
}

/// Gradients of the batch-mean cross-entropy with respect to every trainable
/// group, plus the loss itself.
struct ModelGrad {
    std::vector<double> quantum;
    Mat head_weights;
    std::vector<double> head_biases;
    Mat adapter_weights;
    std::vector<double> adapter_biases;
    double loss = 0.0;
    int floored_probabilities = 0;
};

/**
 * @brief Chain rule through the softmax head (and adapter when present),
 * combining head partials with per-qubit expectation gradients from the
 * parameter-shift rule.
 */
inline ModelGrad model_grad(const HybridModel &model,
                            std::span<const DataRow> batch) {
    if (batch.empty()) throw std::invalid_argument("model_grad: empty batch");
    const int classes = model.head.class_count();
    const int width = model.head.weights.cols;
    const int d = model.program.free_param_count;
    const auto theta = model.free_parameters();

    ModelGrad g;
    g.quantum.assign(static_cast<std::size_t>(d), 0.0);
    g.head_weights = Mat(classes, width);
    g.head_biases.assign(static_cast<std::size_t>(classes), 0.0);
    if (model.adapter) {
        g.adapter_weights = Mat(model.adapter->output_dim(), model.adapter->input_dim());
        g.adapter_biases.assign(static_cast<std::size_t>(model.adapter->output_dim()), 0.0);
    }

    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    for (const DataRow &row : batch) {
        if (row.label < 0 || row.label >= classes) {
            throw DataError("model_grad: label out of range");
        }
        std::vector<double> scaled = model.scaler
                                         ? model.scaler->transform_row(row.features)
                                         : row.features;
        std::vector<double> pre, angles;
        if (model.adapter) {
            pre = model.adapter->pre_activations(scaled);
            angles = pre;
            for (double &a : angles) a = std::max(a, 0.0);
        } else {
            angles = scaled;
            if (std::ssize(angles) != model.spec.feature_count()) {
                throw std::invalid_argument("model_grad: feature dimension mismatch");
            }
        }

        const auto z = forward(model.program, theta, angles);
        const auto probs = softmax(model.head_logits(z));
        double py = probs[static_cast<std::size_t>(row.label)];
        if (py < 1e-12) {
            py = 1e-12;
            ++g.floored_probabilities;
        }
        g.loss += -std::log(py) * inv_batch;

        // dL/dlogit_l = (p_l - [l == y]) / B
        std::vector<double> dlogit(static_cast<std::size_t>(classes));
        for (int l = 0; l < classes; ++l) {
            dlogit[static_cast<std::size_t>(l)] =
                (probs[static_cast<std::size_t>(l)] - (l == row.label ? 1.0 : 0.0)) * inv_batch;
        }
        for (int l = 0; l < classes; ++l) {
            g.head_biases[static_cast<std::size_t>(l)] += dlogit[static_cast<std::size_t>(l)];
            for (int q = 0; q < width; ++q) {
                g.head_weights.at(l, q) += dlogit[static_cast<std::size_t>(l)] * z[static_cast<std::size_t>(q)];
            }
        }

        // dL/dz_q = sum_l dlogit_l W_{l,q}
        std::vector<double> dz(static_cast<std::size_t>(width), 0.0);
        for (int q = 0; q < width; ++q) {
            for (int l = 0; l < classes; ++l) {
                dz[static_cast<std::size_t>(q)] += dlogit[static_cast<std::size_t>(l)] * model.head.weights.at(l, q);
            }
        }

        const Mat jac = expectation_jacobian(model.program, theta, angles); // q x d
        for (int par = 0; par < d; ++par) {
            double acc = 0.0;
            for (int q = 0; q < width; ++q) acc += dz[static_cast<std::size_t>(q)] * jac.at(q, par);
            g.quantum[static_cast<std::size_t>(par)] += acc;
        }

        if (model.adapter) {
            const Mat fjac = feature_jacobian(model.program, theta, angles); // q x angles
            const int out = model.adapter->output_dim();
            for (int j = 0; j < out; ++j) {
                if (pre[static_cast<std::size_t>(j)] <= 0.0) continue; // ReLU subgradient
                double dangle = 0.0;
                for (int q = 0; q < width; ++q) dangle += dz[static_cast<std::size_t>(q)] * fjac.at(q, j);
                g.adapter_biases[static_cast<std::size_t>(j)] += dangle;
                for (int c = 0; c < model.adapter->input_dim(); ++c) {
                    g.adapter_weights.at(j, c) += dangle * scaled[static_cast<std::size_t>(c)];
                }
            }
        }
    }
    return g;
}

namespace detail {

/// Adam/SGD state for one flat parameter group.
struct OptimizerState {
    std::vector<double> m;
    std::vector<double> v;

    void init(std::size_t n) {
        m.assign(n, 0.0);
        v.assign(n, 0.0);
    }

    void step(std::span<double> params, std::span<const double> grad, double lr,
              Optimizer kind, long t) {
        constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (kind == Optimizer::Sgd) {
                params[i] -= lr * grad[i];
                continue;
            }
            m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
            const double mhat = m[i] / (1.0 - std::pow(beta1, static_cast<double>(t)));
            const double vhat = v[i] / (1.0 - std::pow(beta2, static_cast<double>(t)));
            params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
};

inline bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

} // namespace detail

/// Classes actually present in a dataset, with their row counts.
inline std::map<int, std::size_t> model_class_histogram(const Dataset &data) {
    std::map<int, std::size_t> hist;
    for (const DataRow &row : data.rows) ++hist[row.label];
    return hist;
}

/**
 * @brief Mini-batch training on the mean cross-entropy.
 *
 * Splits off a held-out part (stratified, train_fraction), fits the angle
 * scaler on the training part only, then runs the epoch loop. Returns the
 * trained model and metrics evaluated on the held-out split (on the training
 * split when train_fraction leaves nothing held out).
 */
inline std::pair<HybridModel, Metrics> train(const HybridModel &initial,
                                             const Dataset &data,
                                             const TrainConfig &config) {
    data.validate();
    if (config.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (config.batch_size < 1 ||
        static_cast<std::size_t>(config.batch_size) > data.size()) {
        throw std::invalid_argument("train: batch_size must be in [1, dataset size]");
    }
    if (!(config.train_fraction > 0.0 && config.train_fraction <= 1.0)) {
        throw std::invalid_argument("train: train_fraction must be in (0, 1]");
    }
    if (static_cast<int>(model_class_histogram(data).size()) < data.class_count) {
        throw std::invalid_argument("train: every class must be represented");
    }

    Dataset train_part, heldout;
    const auto train_count = static_cast<std::size_t>(
        std::llround(config.train_fraction * static_cast<double>(data.size())));
    if (train_count < data.size()) {
        SplitSpec split_spec{train_count, data.size() - train_count, config.seed};
        std::tie(train_part, heldout) = split(data, split_spec);
    } else {
        train_part = data;
    }

    HybridModel model = initial;
    model.scaler = AngleScaler::fit(train_part);

    auto theta = model.free_parameters();
    detail::OptimizerState quantum_state, head_w_state, head_b_state, adapter_w_state,
        adapter_b_state;
    quantum_state.init(theta.size());
    head_w_state.init(model.head.weights.data.size());
    head_b_state.init(model.head.biases.size());
    if (model.adapter) {
        adapter_w_state.init(model.adapter->weights.data.size());
        adapter_b_state.init(model.adapter->biases.size());
    }

    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(train_part.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto batch = std::min<std::size_t>(
        static_cast<std::size_t>(config.batch_size), train_part.size());

    Metrics metrics;
    long step = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        double epoch_grad_norm = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t stop = std::min(order.size(), start + batch);
            std::vector<DataRow> rows;
            rows.reserve(stop - start);
            for (std::size_t i = start; i < stop; ++i) {
                rows.push_back(train_part.rows[order[i]]);
            }
            model.params = from_free_params(model.spec, theta);
            const ModelGrad g = model_grad(model, rows);
            if (!std::isfinite(g.loss) || !detail::all_finite(g.quantum)) {
                throw NumericError(
                    "train: non-finite loss or gradient at epoch " +
                    std::to_string(epoch + 1) +
                    "; try a smaller --lr-quantum / --lr-head");
            }
            ++step;
            quantum_state.step(theta, g.quantum, config.lr_quantum, config.optimizer, step);
            if (config.train_head) {
                head_w_state.step(model.head.weights.data, g.head_weights.data,
                                  config.lr_head, config.optimizer, step);
                head_b_state.step(model.head.biases, g.head_biases, config.lr_head,
                                  config.optimizer, step);
                if (model.adapter) {
                    adapter_w_state.step(model.adapter->weights.data,
                                         g.adapter_weights.data, config.lr_head,
                                         config.optimizer, step);
                    adapter_b_state.step(model.adapter->biases, g.adapter_biases,
                                         config.lr_head, config.optimizer, step);
                }
            }
            epoch_loss += g.loss;
            double norm_sq = 0.0;
            for (double v : g.quantum) norm_sq += v * v;
            epoch_grad_norm += std::sqrt(norm_sq);
            ++batches;
        }
        metrics.loss_history.push_back(epoch_loss / static_cast<double>(batches));
        metrics.grad_norm_history.push_back(epoch_grad_norm /
                                            static_cast<double>(batches));
    }
    model.params = from_free_params(model.spec, theta);

    const Dataset &eval_part = heldout.rows.empty() ? train_part : heldout;
    Metrics eval_metrics = evaluate(model, eval_part);
    eval_metrics.loss_history = std::move(metrics.loss_history);
    eval_metrics.grad_norm_history = std::move(metrics.grad_norm_history);
    return {std::move(model), std::move(eval_metrics)};
}

// --- checkpoint format ------------------------------------------------------

/// Run provenance stored next to the weights.
struct CheckpointMeta {
    std::uint64_t seed = 0;
    std::string config_hash;
    double train_fraction = 0.7;
    bool train_head = true;

    bool operator==(const CheckpointMeta &) const = default;
};

inline constexpr const char *kCheckpointTag = "qtlearn-checkpoint v1";

namespace detail {

inline void write_doubles(std::ofstream &out, const char *key,
                          std::span<const double> values) {
    out << key << '=';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ' ';
        out << format_double(values[i]);
    }
    out << '\n';
}

inline std::vector<double> parse_doubles(const std::string &text, std::size_t line) {
    std::vector<double> out;
    std::istringstream stream(text);
    std::string tok;
    while (stream >> tok) out.push_back(parse_double(tok, line));
    return out;
}

} // namespace detail

/**
 * @brief Writes the versioned structured-text checkpoint: spec, quantum
 * params (full tensor including structural zeros), head, optional adapter and
 * scaler, seed and config hash.
 */
inline void save_checkpoint(const HybridModel &model, const CheckpointMeta &meta,
                            const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open checkpoint for writing: " + path);
    out << kCheckpointTag << '\n';
    out << "family=" << to_string(model.spec.family) << '\n';
    out << "layers=" << model.spec.layers << '\n';
    out << "qubits=" << model.spec.qubits << '\n';
    out << "reuploading=" << (model.spec.reuploading ? 1 : 0) << '\n';
    out << "entangler=" << to_string(model.spec.entangler) << '\n';
    out << "classes=" << model.head.class_count() << '\n';
    out << "seed=" << meta.seed << '\n';
    out << "config_hash=" << meta.config_hash << '\n';
    out << "train_fraction=" << detail::format_double(meta.train_fraction) << '\n';
    out << "train_head=" << (meta.train_head ? 1 : 0) << '\n';
    detail::write_doubles(out, "params", model.params.values);
    detail::write_doubles(out, "head_weights", model.head.weights.data);
    detail::write_doubles(out, "head_biases", model.head.biases);
    out << "adapter=" << (model.adapter ? model.adapter->input_dim() : 0) << '\n';
    if (model.adapter) {
        detail::write_doubles(out, "adapter_weights", model.adapter->weights.data);
        detail::write_doubles(out, "adapter_biases", model.adapter->biases);
    }
    out << "scaler=" << (model.scaler ? 1 : 0) << '\n';
    if (model.scaler) {
        detail::write_doubles(out, "scaler_range",
                              std::array{model.scaler->angle_lo, model.scaler->angle_hi});
        detail::write_doubles(out, "scaler_min", model.scaler->feature_min);
        detail::write_doubles(out, "scaler_max", model.scaler->feature_max);
    }
    if (!out) throw DataError("checkpoint write failed: " + path);
}

inline std::pair<HybridModel, CheckpointMeta> load_checkpoint(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    std::string line;
    std::size_t line_number = 1;
    if (!std::getline(in, line) || line != kCheckpointTag) {
        throw ParseError("not a qtlearn checkpoint (bad version tag)", 1);
    }
    std::map<std::string, std::string> kv;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value", line_number);
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto need = [&](const std::string &key) -> const std::string & {
        auto it = kv.find(key);
        if (it == kv.end()) throw DataError("checkpoint missing key: " + key);
        return it->second;
    };

    AnsatzSpec spec;
    spec.family = family_from_string(need("family"));
    spec.layers = std::stoi(need("layers"));
    spec.qubits = std::stoi(need("qubits"));
    spec.reuploading = need("reuploading") == "1";
    spec.entangler = entangler_from_string(need("entangler"));
    spec.validate();

    const int classes = std::stoi(need("classes"));
    HybridModel model = init_model(spec, classes, 0);
    model.params.values = detail::parse_doubles(need("params"), 0);
    if (!model.params.shape_matches(spec)) {
        throw DataError("checkpoint params have wrong shape");
    }
    if (spec.family == AnsatzFamily::RealAmplitudes) {
        for (int l = 0; l < spec.layers; ++l) {
            for (int q = 0; q < spec.qubits; ++q) {
                if (model.params.at(l, q, 0) != 0.0 || model.params.at(l, q, 1) != 0.0) {
                    throw DataError(
                        "checkpoint: real-amplitudes phase slots must be zero");
                }
            }
        }
    }
    model.head.weights.data = detail::parse_doubles(need("head_weights"), 0);
    model.head.biases = detail::parse_doubles(need("head_biases"), 0);
    if (std::ssize(model.head.weights.data) != classes * spec.qubits ||
        std::ssize(model.head.biases) != classes) {
        throw DataError("checkpoint head has wrong shape");
    }

    const int adapter_dim = std::stoi(need("adapter"));
    if (adapter_dim > 0) {
        AdapterLayer adapter;
        adapter.weights = Mat(spec.feature_count(), adapter_dim);
        adapter.weights.data = detail::parse_doubles(need("adapter_weights"), 0);
        adapter.biases = detail::parse_doubles(need("adapter_biases"), 0);
        if (std::ssize(adapter.weights.data) != spec.feature_count() * adapter_dim ||
            std::ssize(adapter.biases) != spec.feature_count()) {
            throw DataError("checkpoint adapter has wrong shape");
        }
        model.adapter = std::move(adapter);
    } else {
        model.adapter.reset();
    }

    if (need("scaler") == "1") {
        AngleScaler scaler;
        const auto range = detail::parse_doubles(need("scaler_range"), 0);
        if (range.size() != 2) throw DataError("checkpoint scaler_range malformed");
        scaler.angle_lo = range[0];
        scaler.angle_hi = range[1];
        scaler.feature_min = detail::parse_doubles(need("scaler_min"), 0);
        scaler.feature_max = detail::parse_doubles(need("scaler_max"), 0);
        if (scaler.feature_min.size() != scaler.feature_max.size()) {
            throw DataError("checkpoint scaler bounds malformed");
        }
        model.scaler = std::move(scaler);
    } else {
        model.scaler.reset();
    }

    CheckpointMeta meta;
    meta.seed = std::stoull(need("seed"));
    meta.config_hash = need("config_hash");
    meta.train_fraction = detail::parse_double(need("train_fraction"), 0);
    meta.train_head = need("train_head") == "1";
    return {std::move(model), std::move(meta)};
}

} // namespace qtl
