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
#ifndef CBSEL_COMMANDS_HPP
#define CBSEL_COMMANDS_HPP

#include "cbsel/dataset_file.hpp"
#include "cbsel/experiment.hpp"
#include "cbsel/predictor.hpp"
#include "cbsel/selection.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cbsel {

/// Everything needed to rebuild a model's view of a dataset; stored as JSON in
/// the checkpoint.
struct ModelMetadata
{
    std::string tool_version;
    std::string config_hash;
    std::string dataset_config_hash;
    std::vector<std::string> feature_groups;
    std::vector<std::string> feature_columns; // dataset columns in model input order
    std::optional<int> delta;                  // rows used; empty means every delay
    bool delta_as_feature = false;
    std::uint64_t split_seed = 0;
    std::uint64_t train_seed = 0;
    double train_fraction = 0.7;
    double validation_fraction = 0.15;
    std::vector<int> codebook_ids;
    std::vector<std::int64_t> overhead_bits;
    int best_epoch = 0;

    std::string to_json() const;
    static ModelMetadata from_json(const std::string &text);
};

/// Seeded split that keeps all rows of one realization in the same part.
void assign_splits_by_realization(Dataset &data, const std::vector<int> &realization, double train_fraction,
                                  double validation_fraction, std::uint64_t seed);

/// Rows and columns of `file` as seen by a model: delay filter, feature columns,
/// optional delay column and the recorded split. Throws ShapeError if a column is missing.
Dataset model_view(const DatasetFile &file, const ModelMetadata &meta);

struct TrainRequest
{
    std::optional<int> delta;
    std::vector<std::string> feature_groups; // empty: the configured groups
};

struct TrainOutcome
{
    TrainResult result;
    ModelMetadata metadata;
    Dataset data; // model view with splits
};

TrainConfig resolved_train_config(const ExperimentConfig &config, const ModelMetadata &meta);

TrainOutcome train_model(const DatasetFile &file, const ExperimentConfig &config, const TrainRequest &request);

void cmd_dataset(const ExperimentConfig &config, const std::string &out_path);

/// Writes the checkpoint to `out_path` and the loss curve to `<out_path>.loss.csv`.
void cmd_train(const ExperimentConfig &config, const std::string &dataset_path, const std::string &out_path,
               const TrainRequest &request);

/// Per-codebook test MSE in units of 1e-3.
void cmd_eval(const std::string &model_path, const std::string &dataset_path, const std::string &out_path);

/// Writes permutation importance (validation split) to `out_path` and the prune/retrain sweep
/// (test split) to `<out_path>.sweep.csv`.
void cmd_importance(const ExperimentConfig &config, const std::string &model_path, const std::string &dataset_path,
                    const std::string &out_path);

/// Writes the policy report to `out_path` (CSV) and `<out_path>.json`.
void cmd_select(const std::vector<SelectionPolicy> &policies, const std::string &model_path,
                const std::string &dataset_path, const std::string &out_path);

struct PlotRequest
{
    std::string dataset_path;
    std::vector<std::string> loss_paths;
    std::string report_path;
};

void cmd_plot(const PlotRequest &request, const std::string &out_path);

} // namespace cbsel

#endif
