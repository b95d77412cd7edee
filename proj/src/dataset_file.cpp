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
#include "cbsel/dataset_file.hpp"

#include "cbsel/agcs.hpp"
#include "cbsel/assistance.hpp"
#include "cbsel/errors.hpp"
#include "cbsel/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace cbsel {

using nlohmann::json;

DatasetFile generate_dataset(const ExperimentConfig &config)
{
    config.validate();
    const int D = config.dataset_size;
    const int nd = static_cast<int>(config.deltas.size());
    const int G = static_cast<int>(config.codebooks.size());

    DatasetFile file;
    file.config_hash = config.hash();
    file.tool_version = tool_version();
    file.overhead_bits = config.overhead_table();
    file.deltas = config.deltas;

    Dataset &data = file.data;
    for (const auto &cb : config.codebooks)
        data.codebook_ids.push_back(cb.id);
    data.base_feature_count = config.geometry.ports_per_pol() + config.assistance.F + config.assistance.Q;
    data.labels.resize(static_cast<Eigen::Index>(D) * nd, G);

    for (int i = 0; i < D; ++i) {
        const ScenarioDraw draw = config.draw_scenario(i);
        const std::uint64_t seed = config.realization_seed(i);
        const ChannelRealization channel = generate_channel(config.geometry, draw.scenario, seed);

        const AssistanceReport report =
            compute_assistance(channel, config.assistance, derive_seed(config.seed, "assistance-noise", static_cast<std::uint64_t>(i)));
        const Eigen::VectorXd features = assemble_features(report);
        if (i == 0) {
            data.feature_names = feature_names(report);
            data.features.resize(static_cast<Eigen::Index>(D) * nd, features.size());
        }
        const Eigen::MatrixXd labels = agcs_labels(channel, config.grid, config.codebooks, config.deltas, config.num_layers);
        for (int d = 0; d < nd; ++d) {
            const Eigen::Index row = static_cast<Eigen::Index>(i) * nd + d;
            data.features.row(row) = features.transpose();
            data.labels.row(row) = labels.row(d);
            data.provenance.push_back({draw.scenario_id(), seed, config.deltas[static_cast<std::size_t>(d)]});
            file.realization.push_back(i);
        }
    }
    data.split.assign(static_cast<std::size_t>(data.rows()), Split::train);
    data.validate();
    return file;
}

void write_dataset(std::ostream &out, const DatasetFile &file)
{
    const Dataset &data = file.data;
    const json header = {
        {"format", "cbsel-dataset"},
        {"format_version", dataset_format_version},
        {"tool_version", file.tool_version},
        {"config_hash", file.config_hash},
        {"feature_names", data.feature_names},
        {"codebook_ids", data.codebook_ids},
        {"overhead_bits", file.overhead_bits},
        {"deltas", file.deltas},
        {"base_feature_count", data.base_feature_count},
        {"rows", data.rows()},
    };
    out << header.dump() << '\n';
    for (int r = 0; r < data.rows(); ++r) {
        const auto &p = data.provenance[static_cast<std::size_t>(r)];
        std::vector<double> features(data.features.row(r).begin(), data.features.row(r).end());
        std::vector<double> labels(data.labels.row(r).begin(), data.labels.row(r).end());
        const json row = {
            {"realization", file.realization[static_cast<std::size_t>(r)]},
            {"seed", p.seed},
            {"scenario_id", p.scenario_id},
            {"delta", p.delta},
            {"features", features},
            {"labels", labels},
        };
        out << row.dump() << '\n';
    }
}

namespace {

template <typename T>
T field(const json &obj, const char *key, std::size_t line)
{
    if (!obj.is_object() || !obj.contains(key))
        throw FormatError(std::string("dataset: missing field '") + key + "'", line);
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception &) {
        throw FormatError(std::string("dataset: field '") + key + "' has the wrong type", line);
    }
}

} // namespace

DatasetFile read_dataset(std::istream &in)
{
    std::string text;
    std::size_t line = 0;
    if (!std::getline(in, text))
        throw FormatError("dataset: empty file", 1);
    ++line;

    json header;
    try {
        header = json::parse(text);
    } catch (const json::parse_error &) {
        throw FormatError("dataset: malformed header", line);
    }
    if (field<std::string>(header, "format", line) != "cbsel-dataset")
        throw FormatError("dataset: not a cbsel dataset", line);
    const int version = field<int>(header, "format_version", line);
    if (version != dataset_format_version)
        throw VersionError("dataset: unsupported format version " + std::to_string(version), line);

    DatasetFile file;
    Dataset &data = file.data;
    file.tool_version = field<std::string>(header, "tool_version", line);
    file.config_hash = field<std::string>(header, "config_hash", line);
    data.feature_names = field<std::vector<std::string>>(header, "feature_names", line);
    data.codebook_ids = field<std::vector<int>>(header, "codebook_ids", line);
    file.overhead_bits = field<std::vector<std::int64_t>>(header, "overhead_bits", line);
    file.deltas = field<std::vector<int>>(header, "deltas", line);
    data.base_feature_count = field<int>(header, "base_feature_count", line);
    const int rows = field<int>(header, "rows", line);
    if (rows < 0)
        throw FormatError("dataset: negative row count", line);
    if (file.overhead_bits.size() != data.codebook_ids.size())
        throw FormatError("dataset: overhead table does not match the codebook list", line);

    const auto d = static_cast<Eigen::Index>(data.feature_names.size());
    const auto G = static_cast<Eigen::Index>(data.codebook_ids.size());
    data.features.resize(rows, d);
    data.labels.resize(rows, G);
    for (int r = 0; r < rows; ++r) {
        if (!std::getline(in, text))
            throw FormatError("dataset: expected " + std::to_string(rows) + " rows, found " + std::to_string(r), line + 1);
        ++line;
        json row;
        try {
            row = json::parse(text);
        } catch (const json::parse_error &) {
            throw FormatError("dataset: malformed row", line);
        }
        const auto features = field<std::vector<double>>(row, "features", line);
        const auto labels = field<std::vector<double>>(row, "labels", line);
        if (static_cast<Eigen::Index>(features.size()) != d)
            throw FormatError("dataset: feature count does not match the header", line);
        if (static_cast<Eigen::Index>(labels.size()) != G)
            throw FormatError("dataset: label count does not match the header", line);
        for (Eigen::Index c = 0; c < d; ++c)
            data.features(r, c) = features[static_cast<std::size_t>(c)];
        for (Eigen::Index c = 0; c < G; ++c) {
            const double v = labels[static_cast<std::size_t>(c)];
            if (!(v >= 0.0 && v <= 1.0 + 1e-12))
                throw FormatError("dataset: label outside [0, 1]", line);
            data.labels(r, c) = v;
        }
        data.provenance.push_back(
            {field<int>(row, "scenario_id", line), field<std::uint64_t>(row, "seed", line), field<int>(row, "delta", line)});
        file.realization.push_back(field<int>(row, "realization", line));
    }
    while (std::getline(in, text)) {
        ++line;
        if (!text.empty())
            throw FormatError("dataset: trailing content after the declared rows", line);
    }
    data.split.assign(static_cast<std::size_t>(rows), Split::train);
    return file;
}

void save_dataset(const std::string &path, const DatasetFile &file)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write dataset '" + path + "'");
    write_dataset(out, file);
    if (!out)
        throw ConfigError("failed writing dataset '" + path + "'");
}

DatasetFile load_dataset(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open dataset '" + path + "'");
    return read_dataset(in);
}

} // namespace cbsel
