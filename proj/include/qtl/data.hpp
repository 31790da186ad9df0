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
 * Datasets: synthetic Gaussian two-class generation, delimited-text feature
 * files (the stand-in for an upstream frozen feature extractor), min-max
 * angle rescaling and stratified splitting.
 *
 * Feature file format (UTF-8, LF line endings, '#' comment lines ignored):
 *
 *     classes=<C>,features=<F>
 *     <label>,<f1>,...,<fF>
 *     ...
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qtl/errors.hpp"

namespace qtl {

struct DataRow {
    std::vector<double> features;
    int label = 0;

    bool operator==(const DataRow &) const = default;
};

struct Dataset {
    std::vector<DataRow> rows;
    int class_count = 0;
    std::size_t feature_dim = 0;

    std::size_t size() const { return rows.size(); }

    void validate() const {
        for (const DataRow &row : rows) {
            if (row.features.size() != feature_dim) {
                throw DataError("dataset row has inconsistent feature dimension");
            }
            if (row.label < 0 || row.label >= class_count) {
                throw DataError("dataset label " + std::to_string(row.label) +
                                " out of range for " + std::to_string(class_count) +
                                " classes");
            }
        }
    }

    bool operator==(const Dataset &) const = default;
};

struct SplitSpec {
    std::size_t train_count = 0;
    std::size_t test_count = 0;
    std::uint64_t seed = 0;
};

/**
 * @brief Two-class Gaussian synthetic data: n/2 points per class, class c
 * drawn from Normal(mean = (-1)^c * separation * e1, sd = sigma) in `dim`
 * dimensions. Deterministic under `seed`.
 */
inline Dataset gen_synthetic(std::size_t n = 100, std::size_t dim = 3,
                             double sigma = 0.5, double separation = 1.0,
                             std::uint64_t seed = 0) {
    if (n == 0 || n % 2 != 0) {
        throw std::invalid_argument("gen_synthetic: n must be positive and even");
    }
    if (dim == 0) throw std::invalid_argument("gen_synthetic: dim must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("gen_synthetic: sigma must be > 0");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    Dataset data;
    data.class_count = 2;
    data.feature_dim = dim;
    data.rows.reserve(n);
    for (int label = 0; label < 2; ++label) {
        const double mean_x1 = (label == 0 ? 1.0 : -1.0) * separation;
        for (std::size_t i = 0; i < n / 2; ++i) {
            DataRow row;
            row.label = label;
            row.features.resize(dim);
            for (std::size_t d = 0; d < dim; ++d) {
                row.features[d] = (d == 0 ? mean_x1 : 0.0) + noise(rng);
            }
            data.rows.push_back(std::move(row));
        }
    }
    return data;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string &text, std::size_t line) {
    std::size_t consumed = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &consumed);
    } catch (const std::exception &) {
        throw ParseError("not a number: '" + text + "'", line);
    }
    if (consumed != text.size()) throw ParseError("trailing junk in number: '" + text + "'", line);
    return value;
}

inline std::vector<std::string> split_fields(const std::string &line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

} // namespace detail

/// Parses a feature file. Malformed rows raise ParseError with the line
/// number; out-of-range labels raise DataError.
inline Dataset load_features(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open feature file: " + path);

    Dataset data;
    std::string line;
    std::size_t line_number = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            int classes = 0;
            long long features = 0;
            if (std::sscanf(line.c_str(), "classes=%d,features=%lld", &classes,
                            &features) != 2 ||
                classes < 1 || features < 1) {
                throw ParseError("expected header 'classes=<C>,features=<F>'", line_number);
            }
            data.class_count = classes;
            data.feature_dim = static_cast<std::size_t>(features);
            header_seen = true;
            continue;
        }
        const auto fields = detail::split_fields(line, ',');
        if (fields.size() != data.feature_dim + 1) {
            throw ParseError("expected " + std::to_string(data.feature_dim + 1) +
                                 " comma-separated fields, got " +
                                 std::to_string(fields.size()),
                             line_number);
        }
        DataRow row;
        const double label_value = detail::parse_double(fields[0], line_number);
        row.label = static_cast<int>(label_value);
        if (static_cast<double>(row.label) != label_value) {
            throw ParseError("label must be an integer", line_number);
        }
        if (row.label < 0 || row.label >= data.class_count) {
            throw DataError("label " + std::to_string(row.label) +
                            " out of range on line " + std::to_string(line_number));
        }
        row.features.reserve(data.feature_dim);
        for (std::size_t f = 1; f < fields.size(); ++f) {
            row.features.push_back(detail::parse_double(fields[f], line_number));
        }
        data.rows.push_back(std::move(row));
    }
    if (!header_seen) throw ParseError("empty feature file", line_number == 0 ? 1 : line_number);
    return data;
}

/// Writes the feature-file format load_features parses. Doubles are printed
/// with %.17g so save/load round-trips bit-exactly. Extra comment lines (no
/// trailing newline needed) may be injected at the top.
inline void save_features(const Dataset &data, const std::string &path,
                          std::span<const std::string> comments = {}) {
    data.validate();
    std::ofstream out(path, std::ios::binary); // binary: LF endings everywhere
    if (!out) throw DataError("cannot open output file: " + path);
    for (const std::string &c : comments) out << "# " << c << "\n";
    out << "classes=" << data.class_count << ",features=" << data.feature_dim << "\n";
    for (const DataRow &row : data.rows) {
        out << row.label;
        for (double v : row.features) out << ',' << detail::format_double(v);
        out << "\n";
    }
    if (!out) throw DataError("write failed: " + path);
}

/**
 * @brief Per-feature affine min-max map onto an angle interval, fit on a
 * training split and reapplied (with clamping) to anything else.
 *
 * Constant training features map every value to the interval midpoint.
 */
struct AngleScaler {
    double angle_lo = 0.0;
    double angle_hi = std::numbers::pi;
    std::vector<double> feature_min;
    std::vector<double> feature_max;

    static AngleScaler fit(const Dataset &train, double lo = 0.0,
                           double hi = std::numbers::pi) {
        if (train.rows.empty()) throw std::invalid_argument("AngleScaler: empty dataset");
        if (!(lo < hi)) throw std::invalid_argument("AngleScaler: need lo < hi");
        AngleScaler s;
        s.angle_lo = lo;
        s.angle_hi = hi;
        s.feature_min.assign(train.feature_dim, std::numeric_limits<double>::infinity());
        s.feature_max.assign(train.feature_dim, -std::numeric_limits<double>::infinity());
        for (const DataRow &row : train.rows) {
            for (std::size_t f = 0; f < train.feature_dim; ++f) {
                s.feature_min[f] = std::min(s.feature_min[f], row.features[f]);
                s.feature_max[f] = std::max(s.feature_max[f], row.features[f]);
            }
        }
        return s;
    }

    std::vector<double> transform_row(std::span<const double> features) const {
        if (features.size() != feature_min.size()) {
            throw std::invalid_argument("AngleScaler: feature dimension mismatch");
        }
        std::vector<double> angles(features.size());
        for (std::size_t f = 0; f < features.size(); ++f) {
            const double span = feature_max[f] - feature_min[f];
            if (span <= 0.0) {
                angles[f] = 0.5 * (angle_lo + angle_hi);
                continue;
            }
            const double t = (features[f] - feature_min[f]) / span;
            angles[f] = std::clamp(angle_lo + t * (angle_hi - angle_lo), angle_lo, angle_hi);
        }
        return angles;
    }

    Dataset transform(const Dataset &data) const {
        Dataset out = data;
        for (DataRow &row : out.rows) row.features = transform_row(row.features);
        return out;
    }

    bool operator==(const AngleScaler &) const = default;
};

/// Fit-and-transform on one dataset (scaling constants from that same data).
inline Dataset rescale_to_angles(const Dataset &data, double lo = 0.0,
                                 double hi = std::numbers::pi) {
    return AngleScaler::fit(data, lo, hi).transform(data);
}

/**
 * @brief Stratified-by-label random split, deterministic under the seed.
 * Per-class allocations follow largest-remainder rounding, so class
 * proportions are preserved within one row. Throws DataError when a present
 * class would end up unrepresented on the training side.
 */
inline std::pair<Dataset, Dataset> split(const Dataset &data, const SplitSpec &spec) {
    if (spec.train_count + spec.test_count != data.size() || spec.train_count == 0 ||
        spec.test_count == 0) {
        throw std::invalid_argument("split: counts must be positive and sum to dataset size");
    }
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(data.class_count));
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        by_class[static_cast<std::size_t>(data.rows[i].label)].push_back(i);
    }
    std::size_t present = 0;
    for (const auto &members : by_class) present += !members.empty();
    if (spec.train_count < present) {
        throw DataError("split: " + std::to_string(spec.train_count) +
                        " train rows cannot represent " + std::to_string(present) +
                        " classes");
    }

    // Proportional allocation of train slots, with every present class keeping
    // at least one row; surplus/deficit settled by largest/smallest remainder.
    const double train_fraction =
        static_cast<double>(spec.train_count) / static_cast<double>(data.size());
    std::vector<std::size_t> take(by_class.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t allocated = 0;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        if (by_class[c].empty()) continue;
        const double exact = train_fraction * static_cast<double>(by_class[c].size());
        take[c] = std::clamp<std::size_t>(static_cast<std::size_t>(exact), 1,
                                          by_class[c].size());
        allocated += take[c];
        remainders.emplace_back(exact - std::floor(exact), c);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto &a, const auto &b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t i = 0; allocated < spec.train_count; ++i) {
        const std::size_t c = remainders[i % remainders.size()].second;
        if (take[c] < by_class[c].size()) {
            ++take[c];
            ++allocated;
        }
    }
    for (std::size_t i = 0; allocated > spec.train_count; ++i) {
        const std::size_t c = remainders[remainders.size() - 1 - (i % remainders.size())].second;
        if (take[c] > 1) {
            --take[c];
            --allocated;
        }
    }

    std::mt19937_64 rng(spec.seed);
    Dataset train{.rows = {}, .class_count = data.class_count, .feature_dim = data.feature_dim};
    Dataset test{.rows = {}, .class_count = data.class_count, .feature_dim = data.feature_dim};
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        std::shuffle(by_class[c].begin(), by_class[c].end(), rng);
        for (std::size_t i = 0; i < by_class[c].size(); ++i) {
            (i < take[c] ? train : test).rows.push_back(data.rows[by_class[c][i]]);
        }
    }
    return {std::move(train), std::move(test)};
}

} // namespace qtl
