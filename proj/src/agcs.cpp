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

#include "cbsel/agcs.hpp"

#include "cbsel/errors.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace cbsel {

namespace {

// Layer precoders for every RB of the grid span and every slot in [slot_begin, slot_end).
// cube[layer] column (f * num_slots + (t - slot_begin)).
std::vector<Eigen::MatrixXcd> precoder_cube(const ChannelView &channel, int rb_span, int slot_begin, int slot_end,
                                            int num_layers)
{
    const int num_slots = slot_end - slot_begin;
    std::vector<Eigen::MatrixXcd> cube(static_cast<std::size_t>(num_layers),
                                       Eigen::MatrixXcd(channel.num_ports(), rb_span * num_slots));
    for (int f = 0; f < rb_span; ++f)
        for (int t = slot_begin; t < slot_end; ++t) {
            const Eigen::MatrixXcd &h = channel.at(f, t);
            if (h.squaredNorm() == 0.0)
                throw DegenerateInputError("ideal_precoders: zero channel matrix at RB " + std::to_string(f) +
                                           ", slot " + std::to_string(t));
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h, Eigen::ComputeThinV);
            const Eigen::MatrixXcd &v = svd.matrixV();
            for (int layer = 0; layer < num_layers; ++layer) {
                Eigen::VectorXcd x = v.col(layer);
                Eigen::Index anchor = 0;
                x.cwiseAbs().maxCoeff(&anchor);
                const double mag = std::abs(x(anchor));
                if (mag > 0.0)
                    x *= std::conj(x(anchor)) / mag;
                x.normalize();
                cube[static_cast<std::size_t>(layer)].col(f * num_slots + (t - slot_begin)) = x;
            }
        }
    return cube;
}

PrecoderField field_from_cube(const Eigen::MatrixXcd &cube, int cube_slots, int slot_offset, const GridConfig &grid,
                              int layer)
{
    PrecoderField field;
    field.grid = grid;
    field.layer = layer;
    field.vectors.resize(cube.rows(), grid.samples());
    for (int k = 0; k < grid.Nf; ++k)
        for (int l = 0; l < grid.Nt; ++l)
            for (int m = 0; m < grid.N_RB; ++m)
                for (int n = 0; n < grid.Ns; ++n) {
                    const int f = k * grid.N_RB + m;
                    const int t = slot_offset + l * grid.Ns + n;
                    field.vectors.col(field.column(k, l, m, n)) = cube.col(f * cube_slots + t);
                }
    return field;
}

void check_layers(const ChannelView &channel, int num_layers)
{
    if (num_layers < 1 || num_layers > std::min(channel.num_rx(), channel.num_ports()))
        throw ConfigError("ideal_precoders: num_layers must lie in [1, min(num_rx, P)]");
}

} // namespace

std::vector<PrecoderField> ideal_precoders(const ChannelView &channel, const GridConfig &grid, int num_layers)
{
    grid.validate(channel.num_rb(), channel.num_slot());
    check_layers(channel, num_layers);
    const auto cube = precoder_cube(channel, grid.rb_span(), 0, grid.slot_span(), num_layers);
    std::vector<PrecoderField> out;
    for (int layer = 0; layer < num_layers; ++layer)
        out.push_back(field_from_cube(cube[static_cast<std::size_t>(layer)], grid.slot_span(), 0, grid, layer));
    return out;
}

Eigen::MatrixXcd representative_precoders(const PrecoderField &field)
{
    const GridConfig &g = field.grid;
    Eigen::MatrixXcd out(field.vectors.rows(), g.tiles());
    for (int k = 0; k < g.Nf; ++k)
        for (int l = 0; l < g.Nt; ++l) {
            const Eigen::VectorXcd first = field.at(k, l, 0, 0);
            Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(first.size());
            for (int m = 0; m < g.N_RB; ++m)
                for (int n = 0; n < g.Ns; ++n) {
                    const Eigen::VectorXcd v = field.at(k, l, m, n);
                    const std::complex<double> ip = first.dot(v); // first^H v
                    const double mag = std::abs(ip);
                    acc += mag > 0.0 ? Eigen::VectorXcd(v * (std::conj(ip) / mag)) : v;
                }
            const double norm = acc.norm();
            out.col(g.tile_index(k, l)) = norm > 1e-12 ? Eigen::VectorXcd(acc / norm) : first;
        }
    return out;
}

double compute_agcs(const PrecoderField &ideal, const Eigen::MatrixXcd &quantized)
{
    const GridConfig &g = ideal.grid;
    if (quantized.rows() != ideal.vectors.rows() || quantized.cols() != g.tiles())
        throw ShapeError("compute_agcs: quantized precoders must be P x (Nf * Nt)");
    double acc = 0.0;
    for (int k = 0; k < g.Nf; ++k)
        for (int l = 0; l < g.Nt; ++l) {
            const auto w = quantized.col(g.tile_index(k, l));
            const double wn = w.norm();
            for (int m = 0; m < g.N_RB; ++m)
                for (int n = 0; n < g.Ns; ++n) {
                    const auto v = ideal.at(k, l, m, n);
                    acc += std::abs(v.dot(w)) / (v.norm() * wn);
                }
        }
    return acc / static_cast<double>(g.samples());
}

Eigen::MatrixXd agcs_labels(const ChannelRealization &channel, const GridConfig &grid,
                            const std::vector<CodebookConfig> &codebooks, const std::vector<int> &deltas,
                            int num_layers)
{
    const ChannelView full(channel);
    check_layers(full, num_layers);
    int max_delta = 0;
    for (int d : deltas) {
        if (d < 0)
            throw RangeError("agcs_labels: negative delay");
        max_delta = std::max(max_delta, d);
    }
    grid.validate(channel.num_rb(), channel.num_slot() - max_delta);
    for (const auto &cb : codebooks)
        cb.validate(channel.geometry(), grid);

    // Only slots reachable by some (stale, fresh) window are decomposed.
    const int slot_end = std::min(channel.num_slot(), max_delta + grid.slot_span());
    const auto cube = precoder_cube(full, grid.rb_span(), 0, slot_end, num_layers);

    Eigen::MatrixXd labels = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(deltas.size()),
                                                   static_cast<Eigen::Index>(codebooks.size()));
    for (int layer = 0; layer < num_layers; ++layer) {
        const Eigen::MatrixXcd &layer_cube = cube[static_cast<std::size_t>(layer)];
        const PrecoderField stale = field_from_cube(layer_cube, slot_end, 0, grid, layer);
        const Eigen::MatrixXcd targets = representative_precoders(stale);
        std::vector<Eigen::MatrixXcd> quantized;
        quantized.reserve(codebooks.size());
        for (const auto &cb : codebooks)
            quantized.push_back(reconstruct(quantize_precoder(targets, cb, channel.geometry(), grid), grid));

        for (std::size_t di = 0; di < deltas.size(); ++di) {
            (void)lag_view(channel, deltas[di]); // range check
            const PrecoderField fresh = field_from_cube(layer_cube, slot_end, deltas[di], grid, layer);
            for (std::size_t c = 0; c < codebooks.size(); ++c)
                labels(static_cast<Eigen::Index>(di), static_cast<Eigen::Index>(c)) += compute_agcs(fresh, quantized[c]);
        }
    }
    return labels / static_cast<double>(num_layers);
}

std::vector<AgcsResult> agcs_over_dataset(const ArrayGeometry &geometry, const ScenarioConfig &scenario,
                                          const std::vector<std::uint64_t> &seeds,
                                          const std::vector<CodebookConfig> &codebooks,
                                          const std::vector<int> &deltas, const GridConfig &grid, int num_layers)
{
    if (seeds.empty() || codebooks.empty() || deltas.empty())
        throw ConfigError("agcs_over_dataset: seeds, codebooks and deltas must be non-empty");

    std::vector<AgcsResult> results;
    for (const auto &cb : codebooks)
        for (int d : deltas) {
            AgcsResult r;
            r.codebook_id = cb.id;
            r.delta_slots = d;
            r.sample_count = static_cast<std::int64_t>(grid.samples()) * static_cast<std::int64_t>(seeds.size());
            results.push_back(std::move(r));
        }

    for (std::uint64_t seed : seeds) {
        const ChannelRealization channel = generate_channel(geometry, scenario, seed);
        const Eigen::MatrixXd labels = agcs_labels(channel, grid, codebooks, deltas, num_layers);
        for (std::size_t c = 0; c < codebooks.size(); ++c)
            for (std::size_t d = 0; d < deltas.size(); ++d)
                results[c * deltas.size() + d].per_realization.push_back(
                    labels(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(c)));
    }
    for (auto &r : results) {
        double sum = 0.0;
        for (double v : r.per_realization)
            sum += v;
        r.mean = sum / static_cast<double>(r.per_realization.size());
    }
    return results;
}

} // namespace cbsel
