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

#ifndef CBSEL_AGCS_HPP
#define CBSEL_AGCS_HPP

#include "cbsel/array_channel.hpp"
#include "cbsel/codebook.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace cbsel {

/// Unit-norm ideal precoders of one layer at (RB, slot) granularity.
/// Sample (k, l, m, n) lives in column ((k * Nt + l) * N_RB + m) * Ns + n.
struct PrecoderField
{
    Eigen::MatrixXcd vectors; // P x (Nf Nt N_RB Ns)
    GridConfig grid;
    int layer = 0;

    int column(int k, int l, int m, int n) const noexcept
    {
        return ((k * grid.Nt + l) * grid.N_RB + m) * grid.Ns + n;
    }
    auto at(int k, int l, int m, int n) const { return vectors.col(column(k, l, m, n)); }
};

/// Per (RB, slot) right singular vectors of the (num_rx x P) channel matrix over the
/// grid's RB/slot span. Canonical phase: the first largest-magnitude entry is real positive.
std::vector<PrecoderField> ideal_precoders(const ChannelView &channel, const GridConfig &grid, int num_layers);

/// Tile representative: mean of the tile's precoders after aligning each one's
/// phase to the tile's first precoder, renormalized. Returns P x (Nf Nt).
Eigen::MatrixXcd representative_precoders(const PrecoderField &field);

/// (1/N) sum |v^H w| / (|v| |w|) with w taken from the sample's tile.
double compute_agcs(const PrecoderField &ideal, const Eigen::MatrixXcd &quantized);

struct AgcsResult
{
    int codebook_id = 0;
    int delta_slots = 0;
    double mean = 0.0;
    std::int64_t sample_count = 0;
    std::vector<double> per_realization;
};

/// AGCS of every (delta, codebook) pair for one realization, averaged over layers.
/// Each layer is quantized from the stale view and scored against the fresh view.
/// Returns a |deltas| x |codebooks| matrix.
Eigen::MatrixXd agcs_labels(const ChannelRealization &channel, const GridConfig &grid,
                            const std::vector<CodebookConfig> &codebooks, const std::vector<int> &deltas,
                            int num_layers);

/// agcs_labels over one realization per seed; results ordered by codebook, then delta.
std::vector<AgcsResult> agcs_over_dataset(const ArrayGeometry &geometry, const ScenarioConfig &scenario,
                                          const std::vector<std::uint64_t> &seeds,
                                          const std::vector<CodebookConfig> &codebooks,
                                          const std::vector<int> &deltas, const GridConfig &grid, int num_layers);

} // namespace cbsel

#endif
