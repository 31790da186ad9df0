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

// qtl: gen-data | train | eval | effdim-sweep.
//
// A config file (INI, sections named after the subcommands) can preload any
// option via --config; command-line flags win. QTL_SEED in the environment is
// the fallback for every --seed flag.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "qtl/cli.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

std::vector<qtl::AnsatzFamily> parse_families(const std::string &csv) {
    std::vector<qtl::AnsatzFamily> families;
    std::istringstream stream(csv);
    std::string token;
    while (std::getline(stream, token, ',')) {
        if (!token.empty()) families.push_back(qtl::family_from_string(token));
    }
    return families;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"qtlearn: variational quantum classifiers, hybrid training, "
                 "and local effective dimension"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI config file; sections mirror the subcommands");

    // gen-data
    qtl::cli::GenDataOptions gen;
    auto *gen_cmd = app.add_subcommand("gen-data", "generate a synthetic feature file");
    gen_cmd->add_option("--n", gen.n, "number of rows (even, split across 2 classes)")
        ->capture_default_str();
    gen_cmd->add_option("--dim", gen.dim, "features per row")->capture_default_str();
    gen_cmd->add_option("--sigma", gen.sigma, "per-class Gaussian sd")->capture_default_str();
    gen_cmd->add_option("--separation", gen.separation, "class mean offset along axis 1")
        ->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "RNG seed")->envname("QTL_SEED")->capture_default_str();
    gen_cmd->add_option("--out", gen.out, "output feature file")->required();

    // shared ansatz flags
    auto add_ansatz_flags = [](CLI::App *cmd, std::string &family, int &layers,
                               int &qubits, bool &reupload) {
        cmd->add_option("--family", family,
                        "real_amplitudes | strong_entangling | single_qubit")
            ->capture_default_str();
        cmd->add_option("--layers", layers, "layer count N")->capture_default_str();
        cmd->add_option("--qubits", qubits, "qubit count (1, 3 or 4)")->capture_default_str();
        cmd->add_flag("--reupload,--reuploading", reupload,
                      "re-encode the features in every layer");
    };

    // train
    qtl::cli::TrainOptions train_options;
    std::string train_family = "strong_entangling";
    std::string train_optimizer = "adam";
    std::string train_adapter = "auto";
    auto *train_cmd = app.add_subcommand("train", "train a hybrid classifier");
    train_cmd->add_option("--data", train_options.data_path, "feature file")->required();
    add_ansatz_flags(train_cmd, train_family, train_options.layers,
                     train_options.qubits, train_options.reuploading);
    train_cmd->add_option("--epochs", train_options.train.epochs, "training epochs")
        ->capture_default_str();
    train_cmd->add_option("--batch", train_options.train.batch_size, "mini-batch size")
        ->capture_default_str();
    train_cmd->add_option("--lr-quantum", train_options.train.lr_quantum,
                          "learning rate for circuit angles")
        ->capture_default_str();
    train_cmd->add_option("--lr-head", train_options.train.lr_head,
                          "learning rate for classical layers")
        ->capture_default_str();
    train_cmd->add_option("--optimizer", train_optimizer, "adam | sgd")->capture_default_str();
    train_cmd->add_option("--train-fraction", train_options.train.train_fraction,
                          "fraction of rows used for training; the rest is held out")
        ->capture_default_str();
    bool freeze_head = false;
    train_cmd->add_flag("--freeze-head", freeze_head,
                        "update only the quantum layer, keep classical layers fixed");
    train_cmd->add_option("--adapter", train_adapter,
                          "auto | on | off: affine+ReLU map from file features to angles")
        ->capture_default_str();
    train_cmd->add_option("--seed", train_options.train.seed, "RNG seed")
        ->envname("QTL_SEED")
        ->capture_default_str();
    train_cmd->add_option("--out", train_options.checkpoint_out, "checkpoint path")->required();
    train_cmd->add_option("--metrics-out", train_options.metrics_out, "metrics CSV path");

    // eval
    qtl::cli::EvalOptions eval_options;
    std::string eval_split = "all";
    auto *eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a feature file");
    eval_cmd->add_option("--checkpoint", eval_options.checkpoint_path, "checkpoint path")
        ->required();
    eval_cmd->add_option("--data", eval_options.data_path, "feature file")->required();
    eval_cmd->add_option("--split", eval_split,
                         "all | holdout (holdout replays the training split)")
        ->capture_default_str();
    eval_cmd->add_option("--metrics-out", eval_options.metrics_out, "metrics CSV path");

    // effdim-sweep
    qtl::cli::SweepOptions sweep_options;
    std::string sweep_families = "real_amplitudes,strong_entangling";
    std::string sweep_theta_mode = "fixed";
    bool sweep_no_train = false;
    auto *sweep_cmd =
        app.add_subcommand("effdim-sweep", "local effective dimension over an n grid");
    sweep_cmd->add_option("--data", sweep_options.data_path, "feature file")->required();
    sweep_cmd->add_option("--families", sweep_families, "comma-separated family list")
        ->capture_default_str();
    sweep_cmd->add_option("--layers", sweep_options.layers, "layer count N")
        ->capture_default_str();
    sweep_cmd->add_option("--qubits", sweep_options.qubits, "qubit count")
        ->capture_default_str();
    sweep_cmd->add_flag("--reupload,--reuploading", sweep_options.reuploading,
                        "re-encode the features in every layer");
    sweep_cmd
        ->add_option("--n-grid", sweep_options.n_grid,
                     "dataset sizes n (comma separated)")
        ->delimiter(',')
        ->capture_default_str();
    sweep_cmd->add_option("--lambda", sweep_options.lambda, "lambda in (2 pi log n / n, 1]")
        ->capture_default_str();
    sweep_cmd->add_option("--epsilon-scale", sweep_options.epsilon_scale,
                          "ball radius = epsilon-scale / sqrt(n)")
        ->capture_default_str();
    sweep_cmd->add_option("--samples", sweep_options.samples, "Monte Carlo samples M")
        ->capture_default_str();
    sweep_cmd->add_option("--theta-mode", sweep_theta_mode, "fixed | retrain-per-n")
        ->capture_default_str();
    sweep_cmd->add_flag("--no-train", sweep_no_train,
                        "skip training; use the seeded random initialization as theta*");
    sweep_cmd->add_option("--train-epochs", sweep_options.train.epochs,
                          "epochs used when training theta*")
        ->capture_default_str();
    sweep_cmd->add_option("--seed", sweep_options.seed, "RNG seed")
        ->envname("QTL_SEED")
        ->capture_default_str();
    sweep_cmd->add_option("--out", sweep_options.out, "curve CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (gen_cmd->parsed()) {
            qtl::cli::run_gen_data(gen);
        } else if (train_cmd->parsed()) {
            train_options.family = qtl::family_from_string(train_family);
            train_options.train.train_head = !freeze_head;
            if (train_optimizer == "adam") {
                train_options.train.optimizer = qtl::Optimizer::Adam;
            } else if (train_optimizer == "sgd") {
                train_options.train.optimizer = qtl::Optimizer::Sgd;
            } else {
                throw qtl::ConfigError("unknown optimizer: " + train_optimizer);
            }
            if (train_adapter == "auto") {
                train_options.adapter = qtl::cli::AdapterMode::Auto;
            } else if (train_adapter == "on") {
                train_options.adapter = qtl::cli::AdapterMode::On;
            } else if (train_adapter == "off") {
                train_options.adapter = qtl::cli::AdapterMode::Off;
            } else {
                throw qtl::ConfigError("unknown adapter mode: " + train_adapter);
            }
            qtl::cli::run_train(train_options);
        } else if (eval_cmd->parsed()) {
            if (eval_split == "all") {
                eval_options.split = qtl::cli::EvalSplit::All;
            } else if (eval_split == "holdout") {
                eval_options.split = qtl::cli::EvalSplit::Holdout;
            } else {
                throw qtl::ConfigError("unknown split: " + eval_split);
            }
            qtl::cli::run_eval(eval_options);
        } else if (sweep_cmd->parsed()) {
            sweep_options.families = parse_families(sweep_families);
            sweep_options.train_theta = !sweep_no_train;
            if (sweep_theta_mode == "fixed") {
                sweep_options.theta_mode = qtl::cli::ThetaMode::Fixed;
            } else if (sweep_theta_mode == "retrain-per-n") {
                sweep_options.theta_mode = qtl::cli::ThetaMode::RetrainPerN;
            } else {
                throw qtl::ConfigError("unknown theta mode: " + sweep_theta_mode);
            }
            qtl::cli::run_effdim_sweep(sweep_options);
        }
    } catch (const qtl::NumericError &e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const qtl::ParseError &e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const qtl::DataError &e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const qtl::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
