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

#include "cbsel/selection.hpp"

#include "cbsel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace cbsel {

std::string policy_name(const SelectionPolicy &policy)
{
    return std::holds_alternative<ThresholdFirst>(policy) ? "threshold_first" : "reference_gain";
}

int select_threshold_first(std::span<const double> preds, double rho_min)
{
    if (preds.empty())
        throw ConfigError("select_threshold_first: no candidates");
    for (std::size_t i = 0; i < preds.size(); ++i)
        if (preds[i] >= rho_min)
            return static_cast<int>(i);
    return static_cast<int>(std::max_element(preds.begin(), preds.end()) - preds.begin());
}

int select_reference_gain(std::span<const double> preds, int reference, std::span<const double> rho0)
{
    const int n = static_cast<int>(preds.size());
    if (reference < 0 || reference >= n)
        throw ConfigError("select_reference_gain: reference is not a candidate");
    if (static_cast<int>(rho0.size()) != n - 1)
        throw ConfigError("select_reference_gain: expected " + std::to_string(n - 1) + " rho0 entries, got " +
                          std::to_string(rho0.size()));
    int best = -1;
    std::size_t k = 0;
    for (int c = 0; c < n; ++c) {
        if (c == reference)
            continue;
        const double threshold = rho0[k++];
        if (preds[static_cast<std::size_t>(c)] - preds[static_cast<std::size_t>(reference)] >= threshold &&
            (best < 0 || preds[static_cast<std::size_t>(c)] > preds[static_cast<std::size_t>(best)]))
            best = c;
    }
    return best < 0 ? reference : best;
}

int select_codebook(const SelectionPolicy &policy, std::span<const double> preds)
{
    if (const auto *tf = std::get_if<ThresholdFirst>(&policy))
        return select_threshold_first(preds, tf->rho_min);
    const auto &rg = std::get<ReferenceGain>(policy);
    return select_reference_gain(preds, rg.reference, rg.rho0);
}

void validate_candidate_order(std::span<const std::int64_t> overhead_bits)
{
    for (std::size_t i = 1; i < overhead_bits.size(); ++i)
        if (overhead_bits[i] <= overhead_bits[i - 1])
            throw ConfigError("selection: candidates must be strictly increasing in overhead");
}

double percentile(std::vector<double> values, double q)
{
    if (values.empty())
        throw ConfigError("percentile: empty sample");
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

PolicyReport evaluate_policy(const Eigen::MatrixXd &predictions, const Eigen::MatrixXd &labels,
                             const SelectionPolicy &policy, std::span<const std::int64_t> overhead_bits,
                             const std::vector<int> &codebook_ids)
{
    const Eigen::Index rows = labels.rows();
    const Eigen::Index g = labels.cols();
    if (predictions.rows() != rows || predictions.cols() != g || static_cast<Eigen::Index>(overhead_bits.size()) != g)
        throw ShapeError("evaluate_policy: predictions, labels and overhead table disagree in shape");
    if (rows == 0)
        throw ConfigError("evaluate_policy: no rows");
    validate_candidate_order(overhead_bits);

    PolicyReport report;
    report.selection_counts.assign(static_cast<std::size_t>(g), 0);
    report.codebook_ids = codebook_ids;
    if (report.codebook_ids.empty())
        for (Eigen::Index c = 0; c < g; ++c)
            report.codebook_ids.push_back(static_cast<int>(c));
    const double largest = static_cast<double>(overhead_bits.back());

    auto summarize = [&](std::string name, const std::vector<double> &agcs, double overhead_sum) {
        PolicyRow row;
        row.name = std::move(name);
        double sum = 0.0;
        for (double a : agcs)
            sum += a;
        row.mean_agcs = sum / static_cast<double>(agcs.size());
        row.p5_agcs = percentile(agcs, 5.0);
        row.mean_overhead_bits = overhead_sum / static_cast<double>(agcs.size());
        row.overhead_reduction_pct = 100.0 * (1.0 - row.mean_overhead_bits / largest);
        return row;
    };

    std::vector<double> achieved;
    double overhead_sum = 0.0;
    std::vector<double> pred_row(static_cast<std::size_t>(g));
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < g; ++c)
            pred_row[static_cast<std::size_t>(c)] = predictions(r, c);
        const int sel = select_codebook(policy, pred_row);
        ++report.selection_counts[static_cast<std::size_t>(sel)];
        achieved.push_back(labels(r, sel));
        overhead_sum += static_cast<double>(overhead_bits[static_cast<std::size_t>(sel)]);
    }
    report.rows.push_back(summarize(policy_name(policy), achieved, overhead_sum));

    for (Eigen::Index c = 0; c < g; ++c) {
        std::vector<double> fixed(labels.col(c).data(), labels.col(c).data() + rows);
        report.rows.push_back(summarize("fixed_cb" + std::to_string(report.codebook_ids[static_cast<std::size_t>(c)]),
                                        fixed, static_cast<double>(overhead_bits[static_cast<std::size_t>(c)]) * rows));
    }
    return report;
}

PolicyReport evaluate_policy(const Dataset &data, const PredictorModel &model, const SelectionPolicy &policy,
                             std::span<const std::int64_t> overhead_bits)
{
    return evaluate_policy(predict(model, data.features), data.labels, policy, overhead_bits, data.codebook_ids);
}

void write_policy_csv(std::ostream &out, const PolicyReport &report)
{
    out << "name,mean_agcs,p5_agcs,mean_overhead_bits,overhead_reduction_pct\n";
    out.precision(10);
    for (const auto &r : report.rows)
        out << r.name << ',' << r.mean_agcs << ',' << r.p5_agcs << ',' << r.mean_overhead_bits << ','
            << r.overhead_reduction_pct << '\n';
}

} // namespace cbsel
