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

#ifndef CBSEL_SELECTION_HPP
#define CBSEL_SELECTION_HPP

#include "cbsel/predictor.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace cbsel {

// Candidate codebooks are always indexed in increasing overhead order.

/// Lowest-overhead candidate whose prediction reaches rho_min; if none does,
/// the candidate with the highest prediction.
struct ThresholdFirst
{
    double rho_min = 0.55;
};

/// Default to `reference`; switch to the highest-predicted candidate among those
/// whose gain over the reference reaches its own threshold. `rho0` lists one
/// threshold per non-reference candidate, in candidate order.
struct ReferenceGain
{
    int reference = 0;
    std::vector<double> rho0 = {0.04, 0.045, 0.1, 0.25};
};

using SelectionPolicy = std::variant<ThresholdFirst, ReferenceGain>;

std::string policy_name(const SelectionPolicy &policy);

int select_threshold_first(std::span<const double> preds, double rho_min);
int select_reference_gain(std::span<const double> preds, int reference, std::span<const double> rho0);
int select_codebook(const SelectionPolicy &policy, std::span<const double> preds);

/// Throws ConfigError unless overheads are strictly increasing.
void validate_candidate_order(std::span<const std::int64_t> overhead_bits);

struct PolicyRow
{
    std::string name;
    double mean_agcs = 0.0;
    double p5_agcs = 0.0;
    double mean_overhead_bits = 0.0;
    double overhead_reduction_pct = 0.0; // relative to the largest codebook
};

struct PolicyReport
{
    std::vector<PolicyRow> rows; // policy first, then one fixed baseline per codebook
    std::vector<int> selection_counts;
    std::vector<int> codebook_ids;
};

/// Applies the policy row by row to `predictions` and scores the chosen codebook
/// with the true AGCS in `labels` (both rows x G).
PolicyReport evaluate_policy(const Eigen::MatrixXd &predictions, const Eigen::MatrixXd &labels,
                             const SelectionPolicy &policy, std::span<const std::int64_t> overhead_bits,
                             const std::vector<int> &codebook_ids = {});

PolicyReport evaluate_policy(const Dataset &data, const PredictorModel &model, const SelectionPolicy &policy,
                             std::span<const std::int64_t> overhead_bits);

/// Linear-interpolation percentile, q in [0, 100].
double percentile(std::vector<double> values, double q);

/// Columns: name,mean_agcs,p5_agcs,mean_overhead_bits,overhead_reduction_pct
void write_policy_csv(std::ostream &out, const PolicyReport &report);

} // namespace cbsel

#endif
