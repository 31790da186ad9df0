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

// Acceptance suite: eight end-to-end criteria, one pass/fail line each.
// Run with no arguments for all criteria, or pass criterion numbers to run a
// subset (e.g. `qtl_acceptance 1 3 6`).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracle_helpers.hpp"
#include "qtl/cli.hpp"
#include "qtl/effdim.hpp"
#include "qtl/hybrid.hpp"
#include "test_models.hpp"

using namespace qtl;

namespace {

constexpr double kPi = std::numbers::pi;

struct CheckFailure {
    std::string message;
};

void require(bool ok, const std::string &message) {
    if (!ok) throw CheckFailure{message};
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// The synthetic benchmark for criterion 4: per seed, a 100-row training set
// at the default separation and a large fresh sample from the same
// distribution held out for accuracy. Training runs to convergence (the
// 20-epoch default is visibly unconverged at batch 64 on 100 rows, which
// would measure optimizer luck rather than the circuit family).
constexpr std::size_t kBenchmarkTrainRows = 100;
constexpr std::size_t kBenchmarkTestRows = 2000;
constexpr double kBenchmarkSeparation = 1.0; // the gen_synthetic default
constexpr int kBenchmarkEpochs = 100;

using BenchmarkTable = std::map<std::pair<AnsatzFamily, int>, std::vector<double>>;

const std::vector<std::uint64_t> kBenchmarkSeeds{1, 2, 3, 4, 5};

const BenchmarkTable &benchmark_results() {
    static const BenchmarkTable table = [] {
        BenchmarkTable out;
        for (AnsatzFamily family :
             {AnsatzFamily::RealAmplitudes, AnsatzFamily::StrongEntangling}) {
            for (int layers : {3, 6, 9}) {
                std::vector<double> held_out;
                for (std::uint64_t seed : kBenchmarkSeeds) {
                    const Dataset train_data = gen_synthetic(
                        kBenchmarkTrainRows, 3, 0.5, kBenchmarkSeparation, seed);
                    const Dataset test_data = gen_synthetic(
                        kBenchmarkTestRows, 3, 0.5, kBenchmarkSeparation, 10'000 + seed);
                    const auto spec = AnsatzSpec::make(family, layers, 3, false);
                    HybridModel model = init_model(spec, 2, seed);
                    TrainConfig config;
                    config.seed = seed;
                    config.epochs = kBenchmarkEpochs;
                    config.train_fraction = 1.0; // all 100 rows train
                    const HybridModel trained = train(model, train_data, config).first;
                    held_out.push_back(evaluate(trained, test_data).accuracy);
                }
                out[{family, layers}] = std::move(held_out);
            }
        }
        return out;
    }();
    return table;
}

double median_accuracy(std::vector<double> acc) {
    std::sort(acc.begin(), acc.end());
    return acc[acc.size() / 2];
}

// 1. Worked-example exactness: the single-qubit pipeline with feature angle
//    pi/2 applied to a |1>-preparing encoding and the identity trainable gate
//    measures <z> = 1 within 1e-12.
void criterion_1() {
    // statevector route, literally: encode |1> (up to phase), rotate by pi/2
    StateVector state = new_zero_state(1);
    state.amplitudes = {cdouble{0.0, 0.0}, cdouble{1.0, 0.0}}; // |1>
    state = apply_single(std::move(state), gate_u(kPi / 2.0), 0);
    state = apply_single(std::move(state), gate_v(0.0, 0.0, 0.0), 0);
    require(std::abs(state.amplitudes[0] - cdouble{0.0, -1.0}) < 1e-12,
            "U(pi/2)|1> should be -i|0>");
    const double z_direct = expect_z(state, 0);
    require(std::abs(z_direct - 1.0) <= 1e-12,
            "direct pipeline gave <z> = " + fmt(z_direct));

    // full forward pass: first feature gate prepares |1> from |0>
    const auto spec = AnsatzSpec::make(AnsatzFamily::SingleQubit, 1, 1, true);
    const auto program = build(spec);
    const std::vector<double> params{0.0, 0.0, 0.0};
    const std::vector<double> features{kPi / 2.0, kPi / 2.0, 0.0};
    const double z = forward(program, params, features)[0];
    require(std::abs(z - 1.0) <= 1e-12, "forward pipeline gave <z> = " + fmt(z));
}

// 2. Gradient fidelity: parameter-shift vs central finite differences
//    (h = 1e-5), 100 random instances per family variant, q in {1,3},
//    N in {1,2,3}; vector relative error <= 1e-6.
void criterion_2() {
    std::mt19937_64 rng(20260808);
    std::vector<AnsatzSpec> variants;
    for (bool reup : {false, true}) {
        variants.push_back(AnsatzSpec::make(AnsatzFamily::SingleQubit, 1, 1, reup));
        variants.push_back(AnsatzSpec::make(AnsatzFamily::RealAmplitudes, 1, 3, reup));
        variants.push_back(AnsatzSpec::make(AnsatzFamily::StrongEntangling, 1, 3, reup));
    }
    for (AnsatzSpec spec : variants) {
        for (int layers = 1; layers <= 3; ++layers) {
            spec.layers = layers;
            const auto program = build(spec);
            const int instances = 100 / 3 + (layers == 1 ? 1 : 0); // ~100 per variant
            for (int trial = 0; trial < instances; ++trial) {
                const auto params = oracle::random_angles(
                    rng, static_cast<std::size_t>(program.free_param_count));
                const auto features = oracle::random_angles(
                    rng, static_cast<std::size_t>(program.feature_count), 0.0, kPi);
                const int obs = static_cast<int>(rng() % static_cast<unsigned>(spec.qubits));
                const auto shift = shift_rule_grad(program, params, features, obs);
                const auto fd = finite_diff_grad(program, params, features, obs, 1e-5);
                double diff_sq = 0.0, shift_sq = 0.0;
                for (std::size_t p = 0; p < shift.size(); ++p) {
                    diff_sq += (shift[p] - fd[p]) * (shift[p] - fd[p]);
                    shift_sq += shift[p] * shift[p];
                }
                const double rel =
                    std::sqrt(diff_sq) / std::max(std::sqrt(shift_sq), 1e-9);
                require(rel <= 1e-6,
                        to_string(spec.family) + " N=" + std::to_string(layers) +
                            ": gradient relative error " + fmt(rel));
            }
        }
    }
}

// 3. Oracle equivalence: forward vs the dense Kronecker matrix chain within
//    1e-10 on 200 random draws over q <= 3, N <= 3.
void criterion_3() {
    std::mt19937_64 rng(31337);
    std::vector<AnsatzSpec> variants;
    for (bool reup : {false, true}) {
        variants.push_back(AnsatzSpec::make(AnsatzFamily::SingleQubit, 1, 1, reup));
        variants.push_back(AnsatzSpec::make(AnsatzFamily::RealAmplitudes, 1, 3, reup));
        variants.push_back(AnsatzSpec::make(AnsatzFamily::StrongEntangling, 1, 3, reup));
    }
    int draws = 0;
    while (draws < 200) {
        for (AnsatzSpec spec : variants) {
            spec.layers = 1 + static_cast<int>(rng() % 3);
            const auto program = build(spec);
            const auto params = oracle::random_angles(
                rng, static_cast<std::size_t>(program.free_param_count));
            const auto features = oracle::random_angles(
                rng, static_cast<std::size_t>(program.feature_count), 0.0, kPi);
            const auto fast = forward(program, params, features);
            const auto slow = oracle::forward_via_unitary(program, params, features);
            for (std::size_t q = 0; q < fast.size(); ++q) {
                require(std::abs(fast[q] - slow[q]) <= 1e-10,
                        to_string(spec.family) + ": |forward - oracle| = " +
                            fmt(std::abs(fast[q] - slow[q])));
            }
            ++draws;
        }
    }
}

// 4. Benchmark ordering: train on the 100-row synthetic set and score each
//    model on a large fresh sample from the same distribution. Strong
//    entangling beats real amplitudes at every N in {3,6,9} (median over 5
//    seeds) and the strong entangling N=3 median is at least 0.85.
void criterion_4() {
    const BenchmarkTable &table = benchmark_results();
    for (int layers : {3, 6, 9}) {
        const double se = median_accuracy(table.at({AnsatzFamily::StrongEntangling, layers}));
        const double ra = median_accuracy(table.at({AnsatzFamily::RealAmplitudes, layers}));
        std::cout << "       N=" << layers << ": strong_entangling median " << fmt(se)
                  << ", real_amplitudes median " << fmt(ra) << "\n";
        require(se > ra, "N=" + std::to_string(layers) +
                             ": strong entangling median " + fmt(se) +
                             " does not exceed real amplitudes " + fmt(ra));
    }
    const double se3 = median_accuracy(table.at({AnsatzFamily::StrongEntangling, 3}));
    require(se3 >= 0.85, "strong entangling N=3 median " + fmt(se3) + " < 0.85");
}

// 5. Effective-dimension ordering: the effdim-sweep grid (N=3, q=3,
//    n in {1e3,1e4,1e5,1e6}, M=256) puts strong entangling strictly below
//    real amplitudes in normalized effective dimension at every n, with all
//    values inside [0, d].
void criterion_5() {
    const auto dir = std::filesystem::temp_directory_path() / "qtl_acceptance";
    std::filesystem::create_directories(dir);
    const auto data_path = (dir / "sweep_data.csv").string();
    save_features(gen_synthetic(100, 3, 0.5, 1.0, 1), data_path);

    cli::SweepOptions options;
    options.data_path = data_path;
    options.families = {AnsatzFamily::RealAmplitudes, AnsatzFamily::StrongEntangling};
    options.layers = 3;
    options.qubits = 3;
    options.reuploading = false;
    options.n_grid = {1000, 10000, 100000, 1000000};
    options.samples = 256;
    options.seed = 1;
    options.out = (dir / "sweep_curve.csv").string();
    std::ostringstream quiet;
    const auto rows = cli::run_effdim_sweep(options, quiet);
    require(rows.size() == 8, "expected 8 sweep rows");

    std::map<std::size_t, double> ra_norm, se_norm;
    for (const cli::SweepRow &row : rows) {
        require(row.report.effective_dimension >= 0.0 &&
                    row.report.effective_dimension <= static_cast<double>(row.report.d),
                "effective dimension " + fmt(row.report.effective_dimension) +
                    " outside [0, d]");
        if (row.spec.family == AnsatzFamily::RealAmplitudes) {
            ra_norm[row.report.config.n] = row.report.normalized;
        } else {
            se_norm[row.report.config.n] = row.report.normalized;
        }
    }
    for (std::size_t n : options.n_grid) {
        std::cout << "       n=" << n << ": strong_entangling " << fmt(se_norm.at(n))
                  << " vs real_amplitudes " << fmt(ra_norm.at(n)) << "\n";
        require(se_norm.at(n) < ra_norm.at(n),
                "n=" + std::to_string(n) + ": strong entangling " +
                    fmt(se_norm.at(n)) + " not below real amplitudes " +
                    fmt(ra_norm.at(n)));
    }
}

// 6. Effective-dimension analytics: the constant-Fisher d=1 closed form
//    log(1+k)/log k within 1e-6 and the Bernoulli Fisher value within 1e-8.
void criterion_6() {
    const testmodels::BernoulliZModel model;
    Dataset rows;
    rows.class_count = 2;
    rows.feature_dim = 1;
    for (int i = 0; i < 4; ++i) rows.rows.push_back(DataRow{{0.0}, i % 2});

    for (double phi : {0.3, 0.9, 1.7}) {
        const auto fisher = empirical_fisher(model, std::vector<double>{phi}, rows);
        require(std::abs(fisher.at(0, 0) - 4.0) <= 1e-8,
                "Bernoulli Fisher at phi=" + fmt(phi) + " is " + fmt(fisher.at(0, 0)));
    }

    for (std::size_t n : {std::size_t{1000}, std::size_t{100000}}) {
        const auto config = EffDimConfig::defaults(n, 5);
        const auto report = local_effective_dimension(
            model, std::vector<double>{0.8}, rows, config);
        const double k = config.k();
        const double expected = std::log(1.0 + k) / std::log(k);
        require(std::abs(report.effective_dimension - expected) <= 1e-6,
                "constant-Fisher case: " + fmt(report.effective_dimension) +
                    " vs closed form " + fmt(expected));
    }
}

// 7. Invariant suites: norm preservation, unitarity, PSD Fisher over 50
//    random models, probability simplex, split partition, seed determinism,
//    and the per-seed loss decrease on the benchmark runs.
void criterion_7() {
    std::mt19937_64 rng(777);

    // norm preservation under long random gate sequences
    for (int trial = 0; trial < 3; ++trial) {
        const int qubits = 2 + static_cast<int>(rng() % 5);
        StateVector state = oracle::random_state(rng, qubits);
        std::uniform_real_distribution<double> angle(-8.0, 8.0);
        for (int step = 0; step < 300; ++step) {
            const int a = static_cast<int>(rng() % static_cast<unsigned>(qubits));
            const int b = (a + 1) % qubits;
            switch (step % 3) {
            case 0: state = apply_single(std::move(state), gate_u(angle(rng)), a); break;
            case 1:
                state = apply_single(std::move(state),
                                     gate_v(angle(rng), angle(rng), angle(rng)), a);
                break;
            default: state = apply_cnot(std::move(state), a, b); break;
            }
        }
        require(std::abs(state.norm_squared() - 1.0) <= 1e-9, "norm drifted");
    }

    // unitarity over 1000 random angle triples
    {
        std::uniform_real_distribution<double> angle(-10.0, 10.0);
        auto defect = [](const Gate2x2 &g) {
            double worst = 0.0;
            for (int r = 0; r < 2; ++r) {
                for (int c = 0; c < 2; ++c) {
                    cdouble acc = (r == c) ? cdouble{-1.0, 0.0} : cdouble{0.0, 0.0};
                    for (int k = 0; k < 2; ++k) {
                        acc += std::conj(g.m[static_cast<std::size_t>(k * 2 + r)]) *
                               g.m[static_cast<std::size_t>(k * 2 + c)];
                    }
                    worst = std::max(worst, std::abs(acc));
                }
            }
            return worst;
        };
        for (int i = 0; i < 1000; ++i) {
            require(defect(gate_u(angle(rng))) <= 1e-12, "gate_u unitarity defect");
            require(defect(gate_v(angle(rng), angle(rng), angle(rng))) <= 1e-12,
                    "gate_v unitarity defect");
        }
    }

    // PSD Fisher over 50 random models
    {
        const Dataset data = gen_synthetic(16, 3, 0.5, 1.0, 3);
        for (int trial = 0; trial < 50; ++trial) {
            const auto family = trial % 2 == 0 ? AnsatzFamily::RealAmplitudes
                                               : AnsatzFamily::StrongEntangling;
            const auto spec =
                AnsatzSpec::make(family, 1 + trial % 3, 3, (trial / 2) % 2 == 1);
            HybridModel model = init_model(spec, 2, rng());
            model.scaler = AngleScaler::fit(data);
            const auto fisher = empirical_fisher(model, model.free_parameters(), data);
            const auto eigs = fisher.eigenvalues();
            require(eigs.front() >= -1e-10,
                    "Fisher min eigenvalue " + fmt(eigs.front()));
        }
    }

    // probability simplex
    {
        const auto spec = AnsatzSpec::make(AnsatzFamily::StrongEntangling, 2, 3, true);
        std::uniform_real_distribution<double> angle(0.0, kPi);
        for (int trial = 0; trial < 25; ++trial) {
            const HybridModel model = init_model(spec, 3, rng());
            const std::vector<double> x{angle(rng), angle(rng), angle(rng)};
            const auto probs = model.probabilities(x);
            double total = 0.0;
            for (double p : probs) {
                require(p >= 0.0, "negative probability");
                total += p;
            }
            require(std::abs(total - 1.0) <= 1e-12, "probabilities sum to " + fmt(total));
        }
    }

    // split partition
    {
        const Dataset data = gen_synthetic(100, 3, 0.5, 1.0, 9);
        const auto [train_part, test_part] = split(data, SplitSpec{70, 30, 5});
        require(train_part.size() == 70 && test_part.size() == 30, "split sizes");
        std::multiset<std::string> before, after;
        auto key = [](const DataRow &row) {
            std::string k = std::to_string(row.label);
            for (double v : row.features) k += ',' + std::to_string(v);
            return k;
        };
        for (const DataRow &row : data.rows) before.insert(key(row));
        for (const DataRow &row : train_part.rows) after.insert(key(row));
        for (const DataRow &row : test_part.rows) after.insert(key(row));
        require(before == after, "split is not a partition");
        for (int label = 0; label < 2; ++label) {
            std::size_t in_train = 0;
            for (const DataRow &row : train_part.rows) in_train += row.label == label;
            require(std::abs(static_cast<double>(in_train) - 35.0) <= 1.0,
                    "split stratification off by more than one row");
        }
    }

    // seed determinism across the pipeline
    {
        require(gen_synthetic(50, 3, 0.5, 1.0, 8) == gen_synthetic(50, 3, 0.5, 1.0, 8),
                "gen_synthetic seed determinism");
        const Dataset data = gen_synthetic(50, 3, 0.5, 1.0, 8);
        const auto spec = AnsatzSpec::make(AnsatzFamily::StrongEntangling, 2, 3, false);
        TrainConfig config;
        config.epochs = 2;
        config.batch_size = 16;
        config.seed = 12;
        const auto a = train(init_model(spec, 2, 12), data, config);
        const auto b = train(init_model(spec, 2, 12), data, config);
        require(a.first.params == b.first.params && a.first.head == b.first.head,
                "training is not seed-deterministic");

        const testmodels::BernoulliZModel bernoulli;
        Dataset rows;
        rows.class_count = 2;
        rows.feature_dim = 1;
        rows.rows.push_back(DataRow{{0.0}, 0});
        const auto config_ed = EffDimConfig::defaults(1000, 77);
        const auto ra = local_effective_dimension(bernoulli, std::vector<double>{0.4},
                                                  rows, config_ed);
        const auto rb = local_effective_dimension(bernoulli, std::vector<double>{0.4},
                                                  rows, config_ed);
        require(ra.effective_dimension == rb.effective_dimension &&
                    ra.half_logdets == rb.half_logdets,
                "effective dimension is not seed-deterministic");
    }

    // loss decrease with the default training config on the synthetic
    // benchmark (N in {3,6}; epoch-20 mean loss below epoch-1; >= 4/5 seeds)
    {
        for (AnsatzFamily family :
             {AnsatzFamily::RealAmplitudes, AnsatzFamily::StrongEntangling}) {
            for (int layers : {3, 6}) {
                int decreased = 0;
                for (std::uint64_t seed : kBenchmarkSeeds) {
                    const Dataset data = gen_synthetic(
                        kBenchmarkTrainRows, 3, 0.5, kBenchmarkSeparation, seed);
                    const auto spec = AnsatzSpec::make(family, layers, 3, false);
                    TrainConfig config;
                    config.seed = seed;
                    const auto metrics = train(init_model(spec, 2, seed), data, config).second;
                    decreased += metrics.loss_history.back() < metrics.loss_history.front();
                }
                require(decreased >= 4,
                        to_string(family) + " N=" + std::to_string(layers) +
                            ": loss decreased in only " + std::to_string(decreased) +
                            "/5 seeds");
            }
        }
    }
}

// 8. Feature-file pipeline: the upstream image features are out of scope, so
//    the ingestion path is validated by round-trip identity and by training /
//    evaluating through 4-feature files with and without the adapter.
void criterion_8() {
    const auto dir = std::filesystem::temp_directory_path() / "qtl_acceptance";
    std::filesystem::create_directories(dir);

    // round-trip identity
    const Dataset data = gen_synthetic(40, 4, 0.5, 1.0, 6);
    const auto path = (dir / "features4.csv").string();
    save_features(data, path);
    require(load_features(path) == data, "feature file round-trip changed the data");

    TrainConfig config;
    config.epochs = 3;
    config.batch_size = 16;
    config.seed = 2;

    // 4 features onto 4 qubits: direct encoding, no adapter
    {
        const auto spec = AnsatzSpec::make(AnsatzFamily::StrongEntangling, 1, 4, false);
        const auto [trained, metrics] =
            train(init_model(spec, 2, 2), load_features(path), config);
        require(!trained.adapter.has_value(), "unexpected adapter for matching dims");
        require(metrics.accuracy >= 0.0 && metrics.accuracy <= 1.0, "bad accuracy");
    }
    // 4 features onto 3 qubits: affine+ReLU adapter in front of the encoding
    {
        const auto spec = AnsatzSpec::make(AnsatzFamily::StrongEntangling, 1, 3, false);
        const auto [trained, metrics] = train(
            init_model(spec, 2, 2, /*adapter_input_dim=*/4), load_features(path), config);
        require(trained.adapter.has_value(), "adapter missing");
        const auto ckpt = (dir / "adapter_model.ckpt").string();
        CheckpointMeta meta;
        meta.seed = 2;
        meta.config_hash = cli::fnv1a_hex("acceptance");
        save_checkpoint(trained, meta, ckpt);
        const auto [loaded, loaded_meta] = load_checkpoint(ckpt);
        const Metrics again = evaluate(loaded, load_features(path));
        const Metrics direct = evaluate(trained, load_features(path));
        require(again.accuracy == direct.accuracy,
                "checkpoint round-trip changed the evaluation");
    }
}

struct Criterion {
    int number;
    std::string title;
    std::function<void()> run;
};

} // namespace

int main(int argc, char **argv) {
    const std::vector<Criterion> criteria{
        {1, "worked-example exactness (<z> = 1 within 1e-12)", criterion_1},
        {2, "gradient fidelity (shift rule vs finite differences, 1e-6)", criterion_2},
        {3, "oracle equivalence (dense matrix chain, 1e-10, 200 draws)", criterion_3},
        {4, "benchmark ordering (strong entangling > real amplitudes, median >= 0.85)",
         criterion_4},
        {5, "effective-dimension ordering over the n grid (M=256)", criterion_5},
        {6, "effective-dimension analytics (closed forms)", criterion_6},
        {7, "invariant suites (norm, unitarity, PSD, simplex, split, seeds, loss)",
         criterion_7},
        {8, "feature-file ingestion (round-trip and pipeline shape)", criterion_8},
    };

    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const Criterion &criterion : criteria) {
        if (!selected.empty() && !selected.contains(criterion.number)) continue;
        try {
            criterion.run();
            std::cout << "[PASS] criterion " << criterion.number << ": "
                      << criterion.title << "\n";
        } catch (const CheckFailure &failure) {
            std::cout << "[FAIL] criterion " << criterion.number << ": "
                      << criterion.title << " -- " << failure.message << "\n";
            ++failures;
        } catch (const std::exception &e) {
            std::cout << "[FAIL] criterion " << criterion.number << ": "
                      << criterion.title << " -- unexpected error: " << e.what()
                      << "\n";
            ++failures;
        }
        std::cout.flush();
    }
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all acceptance criteria passed\n";
    return 0;
}
