// SPDX-License-Identifier: Apache-2.0
//
// cbsel: UE-assisted adaptive codebook selection laboratory
// Copyright (C) 2026 The cbsel authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
// Command-line front end: dataset, train, eval, importance, select, plot.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data-format error,
// 3 numerical failure.

#include "cbsel/commands.hpp"
#include "cbsel/errors.hpp"
#include "cbsel/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

enum ExitCode : int { ok = 0, usage = 1, format = 2, numerical = 3 };

struct Options
{
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string dataset;
    std::string model;
    std::optional<int> delta;
    std::string features;
    std::vector<std::string> policies;
    std::vector<std::string> losses;
    std::string report;
};

cbsel::ExperimentConfig resolve_config(const Options &opt)
{
    cbsel::ExperimentConfig cfg = opt.config_path.empty() ? cbsel::default_experiment()
                                                          : cbsel::load_experiment(opt.config_path);
    if (opt.seed)
        cfg.seed = *opt.seed;
    cfg.validate();
    return cfg;
}

std::vector<std::string> split_list(const std::string &text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

int run(const std::string &command, const Options &opt)
{
    if (command == "dataset") {
        cbsel::cmd_dataset(resolve_config(opt), opt.out);
    } else if (command == "train") {
        cbsel::TrainRequest request;
        request.delta = opt.delta;
        request.feature_groups = split_list(opt.features);
        cbsel::cmd_train(resolve_config(opt), opt.dataset, opt.out, request);
    } else if (command == "eval") {
        cbsel::cmd_eval(opt.model, opt.dataset, opt.out);
    } else if (command == "importance") {
        cbsel::cmd_importance(resolve_config(opt), opt.model, opt.dataset, opt.out);
    } else if (command == "select") {
        std::vector<cbsel::SelectionPolicy> policies;
        if (opt.policies.empty())
            policies = resolve_config(opt).policies;
        for (const auto &p : opt.policies)
            policies.push_back(cbsel::parse_policy(p));
        cbsel::cmd_select(policies, opt.model, opt.dataset, opt.out);
    } else if (command == "plot") {
        cbsel::PlotRequest request{opt.dataset, opt.losses, opt.report};
        cbsel::cmd_plot(request, opt.out);
    }
    return ok;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"cbsel: UE-assisted adaptive codebook selection laboratory"};
    app.set_version_flag("--version", cbsel::tool_version());
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App *sub, bool needs_config) {
        if (needs_config) {
            sub->add_option("--config", opt.config_path, "experiment configuration (JSON, comments allowed)")
                ->check(CLI::ExistingFile);
            sub->add_option("--seed", opt.seed, "override the global seed");
        }
        sub->add_option("--out", opt.out, "output path")->required();
    };

    auto *dataset = app.add_subcommand("dataset", "generate a JSON-lines dataset");
    add_common(dataset, true);

    auto *train = app.add_subcommand("train", "train a predictor and write a checkpoint");
    add_common(train, true);
    train->add_option("--dataset", opt.dataset, "dataset file")->required();
    train->add_option("--delta", opt.delta, "train on rows of this delay only");
    train->add_option("--features", opt.features, "feature groups, e.g. sdcp,fdcp,tdcp");

    auto *eval = app.add_subcommand("eval", "per-codebook test MSE");
    add_common(eval, false);
    eval->add_option("--model", opt.model, "checkpoint")->required();
    eval->add_option("--dataset", opt.dataset, "dataset file")->required();

    auto *importance = app.add_subcommand("importance", "permutation importance and prune/retrain sweep");
    add_common(importance, true);
    importance->add_option("--model", opt.model, "checkpoint")->required();
    importance->add_option("--dataset", opt.dataset, "dataset file")->required();

    auto *select = app.add_subcommand("select", "evaluate selection policies against fixed codebooks");
    add_common(select, true);
    select->add_option("--model", opt.model, "checkpoint")->required();
    select->add_option("--dataset", opt.dataset, "dataset file")->required();
    select->add_option("--policy", opt.policies,
                       "threshold_first[:rho_min] or reference_gain[:ref[:rho0,...]]; repeatable");

    auto *plot = app.add_subcommand("plot", "render an SVG report");
    add_common(plot, false);
    plot->add_option("--dataset", opt.dataset, "dataset file: AGCS CDF per codebook and delay");
    plot->add_option("--loss", opt.losses, "loss-curve CSV from train; repeatable");
    plot->add_option("--report", opt.report, "policy CSV from select");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return usage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, opt);
    } catch (const cbsel::FormatError &e) {
        std::cerr << "cbsel " << command << ": format error: " << e.what() << '\n';
        return format;
    } catch (const cbsel::NumericalError &e) {
        std::cerr << "cbsel " << command << ": numerical error: " << e.what() << '\n';
        return numerical;
    } catch (const cbsel::ConfigError &e) {
        std::cerr << "cbsel " << command << ": " << e.what() << '\n';
        return usage;
    } catch (const cbsel::RangeError &e) {
        std::cerr << "cbsel " << command << ": " << e.what() << '\n';
        return usage;
    } catch (const cbsel::ShapeError &e) {
        std::cerr << "cbsel " << command << ": " << e.what() << '\n';
        return usage;
    } catch (const std::exception &e) {
        std::cerr << "cbsel " << command << ": unexpected error: " << e.what() << '\n';
        return numerical;
    }
}
