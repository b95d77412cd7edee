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
#include "cbsel/commands.hpp"

#include "cbsel/errors.hpp"
#include "cbsel/rng.hpp"
#include "cbsel/svg_plot.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace cbsel {

using nlohmann::json;

namespace {

std::ofstream open_output(const std::string &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write '" + path + "'");
    return out;
}

std::string number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_provenance(std::ostream &out, const ModelMetadata &meta, const std::string &dataset_hash)
{
    out << "# tool_version: " << tool_version() << '\n';
    out << "# config_hash: " << meta.config_hash << '\n';
    out << "# dataset_config_hash: " << dataset_hash << '\n';
}

Checkpoint load_model(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open model '" + path + "'");
    return load_checkpoint(in);
}

std::string delta_label(const ModelMetadata &meta)
{
    return meta.delta ? std::to_string(*meta.delta) : std::string("all");
}

/// Comment-aware CSV reader: returns the header and numeric-or-text cells.
struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open '" + path + "'");
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (table.header.empty()) {
            table.header = cells;
            continue;
        }
        if (cells.size() != table.header.size())
            throw FormatError("csv: column count does not match the header in '" + path + "'", line_no);
        table.rows.push_back(cells);
    }
    return table;
}

double to_double(const std::string &text, const std::string &path)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size())
            throw std::invalid_argument(text);
        return v;
    } catch (const std::logic_error &) {
        throw FormatError("csv: '" + text + "' is not a number in '" + path + "'");
    }
}

int column(const CsvTable &table, const std::string &name, const std::string &path)
{
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end())
        throw FormatError("csv: missing column '" + name + "' in '" + path + "'");
    return static_cast<int>(it - table.header.begin());
}

} // namespace

std::string ModelMetadata::to_json() const
{
    const json doc = {
        {"tool_version", tool_version},
        {"config_hash", config_hash},
        {"dataset_config_hash", dataset_config_hash},
        {"feature_groups", feature_groups},
        {"feature_columns", feature_columns},
        {"delta", delta ? json(*delta) : json(nullptr)},
        {"delta_as_feature", delta_as_feature},
        {"split_seed", split_seed},
        {"train_seed", train_seed},
        {"train_fraction", train_fraction},
        {"validation_fraction", validation_fraction},
        {"codebook_ids", codebook_ids},
        {"overhead_bits", overhead_bits},
        {"best_epoch", best_epoch},
    };
    return doc.dump();
}

ModelMetadata ModelMetadata::from_json(const std::string &text)
{
    ModelMetadata m;
    try {
        const json doc = json::parse(text);
        m.tool_version = doc.at("tool_version").get<std::string>();
        m.config_hash = doc.at("config_hash").get<std::string>();
        m.dataset_config_hash = doc.at("dataset_config_hash").get<std::string>();
        m.feature_groups = doc.at("feature_groups").get<std::vector<std::string>>();
        m.feature_columns = doc.at("feature_columns").get<std::vector<std::string>>();
        if (!doc.at("delta").is_null())
            m.delta = doc.at("delta").get<int>();
        m.delta_as_feature = doc.at("delta_as_feature").get<bool>();
        m.split_seed = doc.at("split_seed").get<std::uint64_t>();
        m.train_seed = doc.at("train_seed").get<std::uint64_t>();
        m.train_fraction = doc.at("train_fraction").get<double>();
        m.validation_fraction = doc.at("validation_fraction").get<double>();
        m.codebook_ids = doc.at("codebook_ids").get<std::vector<int>>();
        m.overhead_bits = doc.at("overhead_bits").get<std::vector<std::int64_t>>();
        m.best_epoch = doc.at("best_epoch").get<int>();
    } catch (const json::exception &e) {
        throw FormatError(std::string("model metadata: ") + e.what());
    }
    return m;
}

void assign_splits_by_realization(Dataset &data, const std::vector<int> &realization, double train_fraction,
                                  double validation_fraction, std::uint64_t seed)
{
    if (realization.size() != static_cast<std::size_t>(data.rows()))
        throw ShapeError("assign_splits_by_realization: one realization index per row is required");
    std::map<int, int> group_of;
    for (int r : realization)
        group_of.emplace(r, static_cast<int>(group_of.size()));
    int next = 0;
    for (auto &entry : group_of)
        entry.second = next++;
    Dataset groups;
    groups.features.resize(static_cast<Eigen::Index>(group_of.size()), 0);
    assign_splits(groups, train_fraction, validation_fraction, seed);
    data.split.resize(realization.size());
    for (std::size_t i = 0; i < realization.size(); ++i)
        data.split[i] = groups.split[static_cast<std::size_t>(group_of.at(realization[i]))];
}

Dataset model_view(const DatasetFile &file, const ModelMetadata &meta)
{
    const Dataset &all = file.data;
    std::vector<int> realization;
    Dataset rows = all.filter_rows([&](int r) {
        const bool keep = !meta.delta || all.provenance[static_cast<std::size_t>(r)].delta == *meta.delta;
        if (keep)
            realization.push_back(file.realization[static_cast<std::size_t>(r)]);
        return keep;
    });

    std::vector<bool> mask(all.feature_names.size(), false);
    std::size_t position = 0;
    for (const auto &name : meta.feature_columns) {
        if (name == "delta" && meta.delta_as_feature)
            continue;
        const auto it = std::find(all.feature_names.begin(), all.feature_names.end(), name);
        if (it == all.feature_names.end())
            throw ShapeError("dataset has no feature column '" + name + "'");
        const auto idx = static_cast<std::size_t>(it - all.feature_names.begin());
        if (idx < position && position > 0)
            throw ShapeError("model feature columns are not in dataset order");
        position = idx;
        mask[idx] = true;
    }
    Dataset view = rows.select_features(mask);
    if (meta.delta_as_feature) {
        Eigen::MatrixXd widened(view.rows(), view.feature_count() + 1);
        widened.leftCols(view.feature_count()) = view.features;
        for (int r = 0; r < view.rows(); ++r)
            widened(r, view.feature_count()) = static_cast<double>(view.provenance[static_cast<std::size_t>(r)].delta);
        view.features = std::move(widened);
        view.feature_names.push_back("delta");
    }
    assign_splits_by_realization(view, realization, meta.train_fraction, meta.validation_fraction, meta.split_seed);
    view.validate();
    return view;
}

TrainConfig resolved_train_config(const ExperimentConfig &config, const ModelMetadata &meta)
{
    TrainConfig tc = config.train;
    tc.seed = meta.train_seed;
    tc.train_fraction = meta.train_fraction;
    tc.validation_fraction = meta.validation_fraction;
    return tc;
}

TrainOutcome train_model(const DatasetFile &file, const ExperimentConfig &config, const TrainRequest &request)
{
    TrainOutcome out;
    ModelMetadata &meta = out.metadata;
    meta.tool_version = tool_version();
    meta.config_hash = config.hash();
    meta.dataset_config_hash = file.config_hash;
    meta.feature_groups = request.feature_groups.empty() ? config.train_features : request.feature_groups;
    for (const auto &g : meta.feature_groups)
        if (g != "sdcp" && g != "fdcp" && g != "tdcp")
            throw ConfigError("unknown feature group '" + g + "'");
    const auto mask = feature_mask_for_groups(file.data.feature_names, meta.feature_groups);
    for (std::size_t c = 0; c < mask.size(); ++c)
        if (mask[c])
            meta.feature_columns.push_back(file.data.feature_names[c]);
    if (meta.feature_columns.empty())
        throw ConfigError("the selected feature groups match no dataset column");
    meta.delta = request.delta;
    if (meta.delta && std::find(file.deltas.begin(), file.deltas.end(), *meta.delta) == file.deltas.end())
        throw ConfigError("the dataset has no rows at delay " + std::to_string(*meta.delta));
    meta.delta_as_feature = config.delta_as_feature && !meta.delta;
    if (meta.delta_as_feature)
        meta.feature_columns.push_back("delta");
    meta.split_seed = derive_seed(config.seed, "split");
    meta.train_seed = derive_seed(config.seed, "train", meta.delta ? static_cast<std::uint64_t>(*meta.delta) + 1 : 0);
    meta.train_fraction = config.train.train_fraction;
    meta.validation_fraction = config.train.validation_fraction;
    meta.codebook_ids = file.data.codebook_ids;
    meta.overhead_bits = file.overhead_bits;

    out.data = model_view(file, meta);
    out.result = train(out.data, resolved_train_config(config, meta));
    meta.best_epoch = out.result.best_epoch;
    return out;
}

void cmd_dataset(const ExperimentConfig &config, const std::string &out_path)
{
    save_dataset(out_path, generate_dataset(config));
}

void cmd_train(const ExperimentConfig &config, const std::string &dataset_path, const std::string &out_path,
               const TrainRequest &request)
{
    const DatasetFile file = load_dataset(dataset_path);
    const TrainOutcome outcome = train_model(file, config, request);
    {
        auto out = open_output(out_path);
        save_checkpoint(out, outcome.result.model, outcome.metadata.to_json());
    }
    auto csv = open_output(out_path + ".loss.csv");
    write_provenance(csv, outcome.metadata, file.config_hash);
    csv << "# delta: " << delta_label(outcome.metadata) << '\n';
    csv << "# best_epoch: " << outcome.result.best_epoch << '\n';
    csv << "epoch,train_mse,validation_mse\n";
    for (std::size_t e = 0; e < outcome.result.train_loss.size(); ++e)
        csv << e << ',' << number(outcome.result.train_loss[e]) << ',' << number(outcome.result.validation_loss[e])
            << '\n';
}

void cmd_eval(const std::string &model_path, const std::string &dataset_path, const std::string &out_path)
{
    const Checkpoint ckpt = load_model(model_path);
    const ModelMetadata meta = ModelMetadata::from_json(ckpt.metadata);
    const DatasetFile file = load_dataset(dataset_path);
    const Dataset test = model_view(file, meta).subset(Split::test);
    if (test.rows() == 0)
        throw ConfigError("eval: the test split is empty");
    const Eigen::VectorXd mse = evaluate_mse(ckpt.model, test);
    const Eigen::VectorXd var =
        (test.labels.rowwise() - test.labels.colwise().mean()).colwise().squaredNorm().transpose() /
        static_cast<double>(test.rows());

    auto csv = open_output(out_path);
    write_provenance(csv, meta, file.config_hash);
    csv << "# delta: " << delta_label(meta) << '\n';
    csv << "# test_rows: " << test.rows() << '\n';
    csv << "codebook_id,mse_e3,label_variance_e3,mse_to_variance\n";
    for (Eigen::Index g = 0; g < mse.size(); ++g)
        csv << test.codebook_ids[static_cast<std::size_t>(g)] << ',' << number(mse(g) * 1e3) << ','
            << number(var(g) * 1e3) << ',' << number(var(g) > 0 ? mse(g) / var(g) : 0.0) << '\n';
    csv << "mean," << number(mse.mean() * 1e3) << ',' << number(var.mean() * 1e3) << ','
        << number(var.mean() > 0 ? mse.mean() / var.mean() : 0.0) << '\n';
}

void cmd_importance(const ExperimentConfig &config, const std::string &model_path, const std::string &dataset_path,
                    const std::string &out_path)
{
    const Checkpoint ckpt = load_model(model_path);
    const ModelMetadata meta = ModelMetadata::from_json(ckpt.metadata);
    const DatasetFile file = load_dataset(dataset_path);
    const Dataset view = model_view(file, meta);
    const Dataset validation = view.subset(Split::validation);
    if (validation.rows() == 0)
        throw ConfigError("importance: the validation split is empty");
    const Eigen::VectorXd importance = permutation_importance(ckpt.model, validation, config.importance_repeats,
                                                              derive_seed(config.seed, "importance"));

    {
        auto csv = open_output(out_path);
        write_provenance(csv, meta, file.config_hash);
        csv << "# delta: " << delta_label(meta) << '\n';
        csv << "feature,importance,rank\n";
        std::vector<int> rank(static_cast<std::size_t>(importance.size()));
        for (std::size_t i = 0; i < rank.size(); ++i)
            rank[i] = static_cast<int>(i);
        std::stable_sort(rank.begin(), rank.end(), [&](int a, int b) { return importance(a) > importance(b); });
        std::vector<int> position(rank.size());
        for (std::size_t i = 0; i < rank.size(); ++i)
            position[static_cast<std::size_t>(rank[i])] = static_cast<int>(i) + 1;
        for (Eigen::Index j = 0; j < importance.size(); ++j)
            csv << view.feature_names[static_cast<std::size_t>(j)] << ',' << number(importance(j)) << ','
                << position[static_cast<std::size_t>(j)] << '\n';
    }

    auto sweep = open_output(out_path + ".sweep.csv");
    write_provenance(sweep, meta, file.config_hash);
    sweep << "# delta: " << delta_label(meta) << '\n';
    sweep << "keep_fraction,kept_features,overhead_reduction_pct";
    for (int id : view.codebook_ids)
        sweep << ",mse_e3_cb" << id;
    sweep << ",mean_mse_e3\n";
    const TrainConfig tc = resolved_train_config(config, meta);
    for (double keep : config.keep_fractions) {
        const PruneResult pr = prune_and_retrain(view, importance, keep, tc);
        const auto kept = std::count(pr.mask.begin(), pr.mask.end(), true);
        sweep << number(keep) << ',' << kept << ',' << number(pr.overhead_reduction_pct);
        for (Eigen::Index g = 0; g < pr.test_mse.size(); ++g)
            sweep << ',' << number(pr.test_mse(g) * 1e3);
        sweep << ',' << number(pr.test_mse.mean() * 1e3) << '\n';
    }
}

void cmd_select(const std::vector<SelectionPolicy> &policies, const std::string &model_path,
                const std::string &dataset_path, const std::string &out_path)
{
    if (policies.empty())
        throw ConfigError("select: at least one policy is required");
    const Checkpoint ckpt = load_model(model_path);
    const ModelMetadata meta = ModelMetadata::from_json(ckpt.metadata);
    const DatasetFile file = load_dataset(dataset_path);
    const Dataset test = model_view(file, meta).subset(Split::test);
    if (test.rows() == 0)
        throw ConfigError("select: the test split is empty");

    PolicyReport combined;
    json counts = json::object();
    std::vector<PolicyRow> baselines;
    for (const auto &policy : policies) {
        const PolicyReport report = evaluate_policy(test, ckpt.model, policy, file.overhead_bits);
        combined.rows.push_back(report.rows.front());
        counts[report.rows.front().name] = report.selection_counts;
        if (baselines.empty())
            baselines.assign(report.rows.begin() + 1, report.rows.end());
        combined.codebook_ids = report.codebook_ids;
    }
    combined.rows.insert(combined.rows.end(), baselines.begin(), baselines.end());

    {
        auto csv = open_output(out_path);
        write_provenance(csv, meta, file.config_hash);
        csv << "# delta: " << delta_label(meta) << '\n';
        csv << "# test_rows: " << test.rows() << '\n';
        write_policy_csv(csv, combined);
    }
    json rows = json::array();
    for (const auto &r : combined.rows)
        rows.push_back({{"name", r.name},
                        {"mean_agcs", r.mean_agcs},
                        {"p5_agcs", r.p5_agcs},
                        {"mean_overhead_bits", r.mean_overhead_bits},
                        {"overhead_reduction_pct", r.overhead_reduction_pct}});
    const json doc = {
        {"tool_version", tool_version()},
        {"config_hash", meta.config_hash},
        {"dataset_config_hash", file.config_hash},
        {"delta", meta.delta ? json(*meta.delta) : json(nullptr)},
        {"test_rows", test.rows()},
        {"codebook_ids", combined.codebook_ids},
        {"overhead_bits", file.overhead_bits},
        {"rows", rows},
        {"selection_counts", counts},
    };
    auto js = open_output(out_path + ".json");
    js << doc.dump(2) << '\n';
}

void cmd_plot(const PlotRequest &request, const std::string &out_path)
{
    std::vector<PlotPanel> panels;
    std::string caption = tool_version();

    if (!request.dataset_path.empty()) {
        const DatasetFile file = load_dataset(request.dataset_path);
        caption += "  dataset config " + file.config_hash;
        for (int delta : file.deltas) {
            PlotPanel panel;
            panel.title = "AGCS CDF per codebook, delay " + std::to_string(delta) + " slots";
            panel.x_label = "true AGCS";
            panel.y_label = "CDF";
            for (int g = 0; g < file.data.output_count(); ++g) {
                std::vector<double> values;
                for (int r = 0; r < file.data.rows(); ++r)
                    if (file.data.provenance[static_cast<std::size_t>(r)].delta == delta)
                        values.push_back(file.data.labels(r, g));
                if (!values.empty())
                    panel.series.push_back(
                        empirical_cdf("cb" + std::to_string(file.data.codebook_ids[static_cast<std::size_t>(g)]), values));
            }
            if (!panel.series.empty())
                panels.push_back(std::move(panel));
        }
    }

    if (!request.loss_paths.empty()) {
        PlotPanel panel;
        panel.title = "Training curves";
        panel.x_label = "epoch";
        panel.y_label = "MSE";
        panel.log_y = true;
        for (const auto &path : request.loss_paths) {
            const CsvTable t = read_csv(path);
            const int ce = column(t, "epoch", path);
            const int ct = column(t, "train_mse", path);
            const int cv = column(t, "validation_mse", path);
            PlotSeries train_s{path + " train", {}, {}, false};
            PlotSeries val_s{path + " validation", {}, {}, false};
            for (const auto &row : t.rows) {
                const double e = to_double(row[static_cast<std::size_t>(ce)], path);
                train_s.x.push_back(e);
                train_s.y.push_back(to_double(row[static_cast<std::size_t>(ct)], path));
                val_s.x.push_back(e);
                val_s.y.push_back(to_double(row[static_cast<std::size_t>(cv)], path));
            }
            panel.series.push_back(std::move(train_s));
            panel.series.push_back(std::move(val_s));
        }
        panels.push_back(std::move(panel));
    }

    if (!request.report_path.empty()) {
        const CsvTable t = read_csv(request.report_path);
        const int cn = column(t, "name", request.report_path);
        const int ca = column(t, "mean_agcs", request.report_path);
        const int co = column(t, "mean_overhead_bits", request.report_path);
        PlotPanel panel;
        panel.title = "Overhead vs achieved AGCS";
        panel.x_label = "mean overhead (bits)";
        panel.y_label = "mean true AGCS";
        for (const auto &row : t.rows)
            panel.series.push_back({row[static_cast<std::size_t>(cn)],
                                    {to_double(row[static_cast<std::size_t>(co)], request.report_path)},
                                    {to_double(row[static_cast<std::size_t>(ca)], request.report_path)},
                                    true});
        panels.push_back(std::move(panel));
    }

    const std::string svg = render_svg(panels, caption);
    auto out = open_output(out_path);
    out << svg;
}

} // namespace cbsel
