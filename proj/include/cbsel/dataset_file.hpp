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
#ifndef CBSEL_DATASET_FILE_HPP
#define CBSEL_DATASET_FILE_HPP

#include "cbsel/experiment.hpp"
#include "cbsel/predictor.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cbsel {

inline constexpr int dataset_format_version = 1;

/// JSON-lines dataset. Line 1 is the header
///   {"format": "cbsel-dataset", "format_version", "tool_version", "config_hash",
///    "feature_names", "codebook_ids", "overhead_bits", "deltas", "base_feature_count", "rows"}
/// and every further line one sample
///   {"realization", "seed", "scenario_id", "delta", "features": [..], "labels": [..]}.
struct DatasetFile
{
    Dataset data;
    std::string config_hash;
    std::string tool_version;
    std::vector<std::int64_t> overhead_bits;
    std::vector<int> deltas;
    std::vector<int> realization; // per row
};

/// Generates the dataset of `config`: for each realization one row per delay,
/// features from the assistance report of the full realization, labels the true
/// AGCS of every codebook at that delay.
DatasetFile generate_dataset(const ExperimentConfig &config);

void write_dataset(std::ostream &out, const DatasetFile &file);

/// Throws FormatError (with line number) on malformed content and VersionError
/// on an unsupported format version.
DatasetFile read_dataset(std::istream &in);

void save_dataset(const std::string &path, const DatasetFile &file);
DatasetFile load_dataset(const std::string &path);

} // namespace cbsel

#endif
