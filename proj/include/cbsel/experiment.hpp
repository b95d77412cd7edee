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
#ifndef CBSEL_EXPERIMENT_HPP
#define CBSEL_EXPERIMENT_HPP

#include "cbsel/array_channel.hpp"
#include "cbsel/assistance.hpp"
#include "cbsel/codebook.hpp"
#include "cbsel/predictor.hpp"
#include "cbsel/selection.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cbsel {

std::string tool_version();

/// Closed interval; a fixed value has lo == hi.
struct ParamRange
{
    double lo = 0.0;
    double hi = 0.0;

    double sample(double u) const noexcept { return lo + (hi - lo) * u; }
};

/// Propagation-condition ranges for one LoS state. Each realization draws every
/// parameter uniformly from its range.
struct PropagationRanges
{
    ParamRange rician_k_db{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    ParamRange delay_spread_s{100e-9, 100e-9};
    ParamRange azimuth_spread_deg{10.0, 10.0};
    ParamRange zenith_spread_deg{3.0, 3.0};
    int num_rays = 20;
};

/// One mobility/environment family of the mixture.
struct ScenarioFamily
{
    std::string name;
    double weight = 1.0;
    double los_fraction = 0.5;
    ParamRange doppler_max_hz{20.0, 20.0};
    PropagationRanges los;
    PropagationRanges nlos;
};

/// Per-realization draw: which family, LoS state and resulting channel parameters.
struct ScenarioDraw
{
    int family = 0;
    bool los = false;
    ScenarioConfig scenario;

    /// 2 * family + (nlos ? 1 : 0)
    int scenario_id() const noexcept { return 2 * family + (los ? 0 : 1); }
};

struct ExperimentConfig
{
    std::uint64_t seed = 2026;
    ArrayGeometry geometry;
    ScenarioConfig base_scenario; // fields shared by every family (rx count, grid extents, spacings)
    std::vector<ScenarioFamily> families;
    GridConfig grid;
    std::vector<CodebookConfig> codebooks;
    std::string codebook_preset; // "desk", "array256" or "" for an explicit list
    AssistanceConfig assistance;
    std::vector<int> deltas{0, 10};
    int dataset_size = 2000;
    int num_layers = 1;
    TrainConfig train;
    std::vector<std::string> train_features{"sdcp", "fdcp", "tdcp"};
    bool delta_as_feature = false;
    int importance_repeats = 5;
    std::vector<double> keep_fractions{1.0, 0.6, 0.4, 0.2, 0.05};
    std::vector<SelectionPolicy> policies{ThresholdFirst{}, ReferenceGain{}};

    /// Throws ConfigError on inconsistent settings.
    void validate() const;

    /// Canonical JSON text of the resolved configuration.
    std::string canonical_json() const;

    /// 16 hex digits of FNV-1a over the canonical JSON.
    std::string hash() const;

    std::vector<std::int64_t> overhead_table() const;

    /// Deterministic family/LoS/parameter draw for realization `index`.
    ScenarioDraw draw_scenario(int index) const;

    /// Seed of the channel realization `index`.
    std::uint64_t realization_seed(int index) const;
};

/// Built-in desk-scale defaults (mixed indoor/outdoor, LoS/NLoS).
ExperimentConfig default_experiment();

/// Parses JSON (comments allowed) on top of the defaults.
ExperimentConfig parse_experiment(const std::string &text);
ExperimentConfig load_experiment(const std::string &path);

/// Parses "threshold_first:0.55", "reference_gain:0:0.04,0.045,0.1,0.25" or a bare policy name.
SelectionPolicy parse_policy(const std::string &text);

} // namespace cbsel

#endif
