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

#include "cbsel/codebook.hpp"

#include "cbsel/errors.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace cbsel {

int ceil_log2(std::int64_t n) noexcept
{
    int bits = 0;
    std::int64_t v = 1;
    while (v < n) {
        v <<= 1;
        ++bits;
    }
    return bits;
}

void GridConfig::validate(int num_rb, int num_slot) const
{
    if (Nf < 1 || N_RB < 1 || Nt < 1 || Ns < 1)
        throw ConfigError("grid: Nf, N_RB, Nt and Ns must be >= 1");
    if (rb_span() > num_rb)
        throw ConfigError("grid: Nf * N_RB = " + std::to_string(rb_span()) + " exceeds " + std::to_string(num_rb) +
                          " resource blocks");
    if (slot_span() > num_slot)
        throw ConfigError("grid: Nt * Ns = " + std::to_string(slot_span()) + " exceeds " + std::to_string(num_slot) +
                          " usable slots");
}

void CodebookConfig::validate(const ArrayGeometry &geometry, const GridConfig &grid) const
{
    const std::string tag = "codebook " + std::to_string(id) + ": ";
    if (L < 1 || L > geometry.ports_per_pol())
        throw ConfigError(tag + "L must lie in [1, n1*n2]");
    if (M < 1 || M > grid.Nf)
        throw ConfigError(tag + "M must lie in [1, Nf]");
    if (T < 1 || T > grid.Nt)
        throw ConfigError(tag + "T must lie in [1, Nt]");
    if (K < 1 || K > coefficient_slots())
        throw ConfigError(tag + "K must lie in [1, 2*L*M*T]");
    if (O1 < 1 || O2 < 1 || Of < 1 || Ot < 1)
        throw ConfigError(tag + "oversampling factors must be >= 1");
    if (amp_bits < 0 || phase_bits < 0 || amp_bits > 16 || phase_bits > 16)
        throw ConfigError(tag + "coefficient bit depths must lie in [0, 16]");
}

void QuantizedPrecoder::validate(const GridConfig &grid) const
{
    auto check = [](const std::vector<int> &idx, int bound, const char *what) {
        if (idx.empty())
            throw ConfigError(std::string("quantized precoder: empty ") + what + " index list");
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (idx[i] < 0 || idx[i] >= bound)
                throw RangeError(std::string("quantized precoder: ") + what + " index out of range");
            if (i > 0 && idx[i] <= idx[i - 1])
                throw ConfigError(std::string("quantized precoder: ") + what + " indices not strictly increasing");
        }
    };
    check(spatial_beams, geometry.ports_per_pol() * O1 * O2, "spatial");
    check(freq_indices, grid.Nf * Of, "frequency");
    check(time_indices, grid.Nt * Ot, "time");
    for (const auto &c : coeffs)
        if (c.row < 0 || c.row >= rows() || c.col < 0 || c.col >= cols())
            throw RangeError("quantized precoder: coefficient position out of range");
}

BeamGrid spatial_dft_grid(const ArrayGeometry &geometry, int O1, int O2)
{
    if (O1 < 1 || O2 < 1)
        throw ConfigError("spatial_dft_grid: oversampling factors must be >= 1");
    const int n1 = geometry.n1;
    const int n2 = geometry.n2;
    const int g1 = n1 * O1;
    const int g2 = n2 * O2;
    BeamGrid grid;
    grid.n1 = n1;
    grid.n2 = n2;
    grid.O1 = O1;
    grid.O2 = O2;
    grid.beams.resize(n1 * n2, g1 * g2);
    const double two_pi = 2.0 * std::numbers::pi;
    for (int q2 = 0; q2 < g2; ++q2)
        for (int q1 = 0; q1 < g1; ++q1)
            for (int p2 = 0; p2 < n2; ++p2)
                for (int p1 = 0; p1 < n1; ++p1) {
                    const double phase = two_pi * (static_cast<double>((p1 * q1) % g1) / g1 +
                                                   static_cast<double>((p2 * q2) % g2) / g2);
                    grid.beams(p2 * n1 + p1, q2 * g1 + q1) = std::polar(1.0, phase);
                }
    return grid;
}

Eigen::MatrixXcd spatial_basis(const BeamGrid &grid, const std::vector<int> &beams)
{
    const int n = static_cast<int>(grid.beams.rows());
    const int L = static_cast<int>(beams.size());
    Eigen::MatrixXcd w1 = Eigen::MatrixXcd::Zero(2 * n, 2 * L);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < L; ++i) {
        w1.block(0, i, n, 1) = grid.beams.col(beams[static_cast<std::size_t>(i)]) * norm;
        w1.block(n, L + i, n, 1) = grid.beams.col(beams[static_cast<std::size_t>(i)]) * norm;
    }
    return w1;
}

Eigen::MatrixXcd dft_basis(int n, int oversampling, const std::vector<int> &indices)
{
    const Eigen::MatrixXcd all = dft_columns(n, oversampling);
    Eigen::MatrixXcd out(n, static_cast<Eigen::Index>(indices.size()));
    for (std::size_t i = 0; i < indices.size(); ++i)
        out.col(static_cast<Eigen::Index>(i)) = all.col(indices[i]) / std::sqrt(static_cast<double>(n));
    return out;
}

std::vector<int> select_spatial_beams(const Eigen::MatrixXcd &precoders, int L, const BeamGrid &grid)
{
    const int n = static_cast<int>(grid.beams.rows());
    if (precoders.rows() != 2 * n)
        throw ShapeError("select_spatial_beams: precoder length must be 2 * n1 * n2");
    if (L < 1 || L > n)
        throw ConfigError("select_spatial_beams: L must lie in [1, n1*n2]");

    // Projected power of both polarization halves onto every beam.
    const Eigen::MatrixXcd top = grid.beams.adjoint() * precoders.topRows(n);
    const Eigen::MatrixXcd bottom = grid.beams.adjoint() * precoders.bottomRows(n);
    const Eigen::VectorXd power =
        (top.cwiseAbs2().rowwise().sum() + bottom.cwiseAbs2().rowwise().sum()) / static_cast<double>(n);

    std::vector<int> best;
    double best_total = -1.0;
    const int g1 = grid.n1 * grid.O1;
    for (int o2 = 0; o2 < grid.O2; ++o2) {
        for (int o1 = 0; o1 < grid.O1; ++o1) {
            std::vector<int> members;
            for (int j = 0; j < grid.n2; ++j)
                for (int i = 0; i < grid.n1; ++i)
                    members.push_back((o2 + grid.O2 * j) * g1 + (o1 + grid.O1 * i));
            std::sort(members.begin(), members.end());
            std::stable_sort(members.begin(), members.end(),
                             [&](int a, int b) { return power(a) > power(b); });
            members.resize(static_cast<std::size_t>(L));
            double total = 0.0;
            for (int m : members)
                total += power(m);
            if (total > best_total) {
                best_total = total;
                best = members;
            }
        }
    }
    std::sort(best.begin(), best.end());
    return best;
}

std::vector<int> greedy_span_selection(const Eigen::MatrixXcd &signals, const Eigen::MatrixXcd &candidates, int count,
                                       int forced)
{
    const Eigen::Index n = candidates.rows();
    const int num_candidates = static_cast<int>(candidates.cols());
    if (signals.rows() != n)
        throw ShapeError("greedy_span_selection: signal and candidate lengths differ");
    if (count < 1 || count > n || count > num_candidates)
        throw ConfigError("greedy_span_selection: cannot select " + std::to_string(count) + " of " +
                          std::to_string(num_candidates) + " columns in dimension " + std::to_string(n));

    std::vector<int> chosen{forced};
    std::vector<char> used(static_cast<std::size_t>(num_candidates), 0);
    used[static_cast<std::size_t>(forced)] = 1;
    Eigen::MatrixXcd q(n, count);
    q.col(0) = candidates.col(forced).normalized();
    int rank = 1;

    while (rank < count) {
        int best = -1;
        double best_gain = -std::numeric_limits<double>::infinity();
        Eigen::VectorXcd best_dir;
        for (int c = 0; c < num_candidates; ++c) {
            if (used[static_cast<std::size_t>(c)])
                continue;
            Eigen::VectorXcd r = candidates.col(c) - q.leftCols(rank) * (q.leftCols(rank).adjoint() * candidates.col(c));
            const double r2 = r.squaredNorm();
            if (r2 < 1e-10)
                continue;
            const double gain = (r.adjoint() * signals).squaredNorm() / r2;
            if (best < 0 || gain > best_gain + 1e-12 * std::max(1.0, std::abs(best_gain))) {
                best_gain = gain;
                best = c;
                best_dir = r / std::sqrt(r2);
            }
        }
        if (best < 0)
            throw NumericalError("greedy_span_selection: candidates do not span the requested dimension");
        used[static_cast<std::size_t>(best)] = 1;
        chosen.push_back(best);
        q.col(rank++) = best_dir;
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

namespace {

// Beam-space coefficients C = W1^H V, reshaped so each column is one signal
// along the chosen axis: frequency (k) or time (l).
Eigen::MatrixXcd axis_signals(const Eigen::MatrixXcd &precoders, const Eigen::MatrixXcd &w1, const GridConfig &grid,
                              bool frequency)
{
    if (precoders.cols() != grid.tiles())
        throw ShapeError("basis selection: precoder matrix must have Nf * Nt columns");
    if (w1.rows() != precoders.rows())
        throw ShapeError("basis selection: W1 row count must equal the port count");
    const Eigen::MatrixXcd c = w1.adjoint() * precoders;
    const int beams = static_cast<int>(c.rows());
    const int len = frequency ? grid.Nf : grid.Nt;
    const int other = frequency ? grid.Nt : grid.Nf;
    Eigen::MatrixXcd out(len, beams * other);
    for (int i = 0; i < beams; ++i)
        for (int o = 0; o < other; ++o)
            for (int x = 0; x < len; ++x) {
                const int tile = frequency ? grid.tile_index(x, o) : grid.tile_index(o, x);
                out(x, i * other + o) = c(i, tile);
            }
    return out;
}

} // namespace

std::vector<int> select_freq_basis(const Eigen::MatrixXcd &precoders, const Eigen::MatrixXcd &w1, int M,
                                   const GridConfig &grid, int Of)
{
    const Eigen::MatrixXcd candidates = dft_columns(grid.Nf, Of).conjugate() / std::sqrt(static_cast<double>(grid.Nf));
    return greedy_span_selection(axis_signals(precoders, w1, grid, true), candidates, M, 0);
}

std::vector<int> select_time_basis(const Eigen::MatrixXcd &precoders, const Eigen::MatrixXcd &w1, int T,
                                   const GridConfig &grid, int Ot)
{
    const Eigen::MatrixXcd candidates = dft_columns(grid.Nt, Ot).conjugate() / std::sqrt(static_cast<double>(grid.Nt));
    return greedy_span_selection(axis_signals(precoders, w1, grid, false), candidates, T, 0);
}

Eigen::MatrixXcd synthesis_matrix(const Eigen::MatrixXcd &wf, const Eigen::MatrixXcd &wd)
{
    return Eigen::MatrixXcd(Eigen::kroneckerProduct(wf, wd)).adjoint();
}

Eigen::MatrixXcd compute_w2(const Eigen::MatrixXcd &precoders, const Eigen::MatrixXcd &w1, const Eigen::MatrixXcd &wf,
                            const Eigen::MatrixXcd &wd)
{
    const Eigen::MatrixXcd z = synthesis_matrix(wf, wd);
    if (precoders.rows() != w1.rows() || precoders.cols() != z.cols())
        throw ShapeError("compute_w2: precoder matrix does not match the basis dimensions");

    const Eigen::MatrixXcd gram_left = w1.adjoint() * w1;
    const Eigen::MatrixXcd gram_right = z * z.adjoint();
    const Eigen::LLT<Eigen::MatrixXcd> left(gram_left);
    const Eigen::LLT<Eigen::MatrixXcd> right(gram_right);
    if (left.info() != Eigen::Success || right.info() != Eigen::Success || left.rcond() < 1e-12 ||
        right.rcond() < 1e-12)
        throw NumericalError("compute_w2: singular normal equations");

    const Eigen::MatrixXcd partial = left.solve(w1.adjoint() * precoders * z.adjoint());
    return right.solve(partial.adjoint()).adjoint();
}

std::vector<SparseCoefficient> quantize_coeffs(const std::vector<SparseCoefficient> &coeffs, int amp_bits,
                                               int phase_bits)
{
    if (amp_bits < 0 || phase_bits < 0)
        throw ConfigError("quantize_coeffs: bit depths must be >= 0");
    double strongest = 0.0;
    for (const auto &c : coeffs)
        strongest = std::max(strongest, std::abs(c.value));
    if (strongest == 0.0)
        return coeffs;

    // Amplitude code c in [1, 2^b - 1] maps to 2^(-(2^b - 1 - c) / 2), i.e. 3 dB
    // power steps below the strongest coefficient; code 0 means zero.
    const int top_code = (1 << amp_bits) - 1;
    const int phase_levels = 1 << phase_bits;
    const double phase_step = 2.0 * std::numbers::pi / phase_levels;

    std::vector<SparseCoefficient> out = coeffs;
    for (auto &c : out) {
        double mag = std::abs(c.value);
        double phase = std::arg(c.value);
        if (amp_bits > 0 && mag > 0.0) {
            const double rel = mag / strongest;
            const double smallest = std::pow(2.0, -(top_code - 1) / 2.0);
            if (rel < 0.5 * smallest) {
                mag = 0.0;
            } else {
                const double code = std::clamp(std::round(top_code + 2.0 * std::log2(rel)), 1.0,
                                               static_cast<double>(top_code));
                mag = strongest * std::pow(2.0, -(top_code - code) / 2.0);
            }
        }
        if (phase_bits > 0) {
            long k = std::lround(phase / phase_step);
            k = ((k % phase_levels) + phase_levels) % phase_levels;
            phase = phase_step * static_cast<double>(k);
        }
        if (amp_bits > 0 || phase_bits > 0)
            c.value = std::polar(mag, phase);
    }
    return out;
}

Eigen::MatrixXcd reconstruct(const QuantizedPrecoder &qp, const GridConfig &grid)
{
    qp.validate(grid);
    const BeamGrid beams = spatial_dft_grid(qp.geometry, qp.O1, qp.O2);
    const Eigen::MatrixXcd w1 = spatial_basis(beams, qp.spatial_beams);
    const Eigen::MatrixXcd z = synthesis_matrix(dft_basis(grid.Nf, qp.Of, qp.freq_indices),
                                                dft_basis(grid.Nt, qp.Ot, qp.time_indices));

    Eigen::MatrixXcd w2 = Eigen::MatrixXcd::Zero(qp.rows(), qp.cols());
    for (const auto &c : qp.coeffs)
        w2(c.row, c.col) = c.value;

    Eigen::MatrixXcd w = w1 * w2 * z;
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
        const double norm = w.col(j).norm();
        if (norm > 1e-14)
            w.col(j) /= norm;
        else
            w.col(j) = w1.col(0);
    }
    return w;
}

std::int64_t overhead_bits(const CodebookConfig &config, const ArrayGeometry &geometry, const GridConfig &grid)
{
    const std::int64_t spatial = static_cast<std::int64_t>(geometry.ports_per_pol()) * config.O1 * config.O2;
    const std::int64_t K = config.K;
    return static_cast<std::int64_t>(config.L) * ceil_log2(spatial) +
           static_cast<std::int64_t>(config.M) * ceil_log2(static_cast<std::int64_t>(grid.Nf) * config.Of) +
           static_cast<std::int64_t>(config.T) * ceil_log2(static_cast<std::int64_t>(grid.Nt) * config.Ot) +
           K * (config.amp_bits + config.phase_bits) + K * ceil_log2(config.coefficient_slots());
}

QuantizedPrecoder quantize_precoder(const Eigen::MatrixXcd &precoders, const CodebookConfig &config,
                                    const ArrayGeometry &geometry, const GridConfig &grid)
{
    config.validate(geometry, grid);
    if (precoders.rows() != geometry.ports() || precoders.cols() != grid.tiles())
        throw ShapeError("quantize_precoder: expected a P x (Nf * Nt) precoder matrix");

    const BeamGrid beams = spatial_dft_grid(geometry, config.O1, config.O2);
    QuantizedPrecoder qp;
    qp.geometry = geometry;
    qp.O1 = config.O1;
    qp.O2 = config.O2;
    qp.Of = config.Of;
    qp.Ot = config.Ot;
    qp.spatial_beams = select_spatial_beams(precoders, config.L, beams);
    const Eigen::MatrixXcd w1 = spatial_basis(beams, qp.spatial_beams);
    qp.freq_indices = select_freq_basis(precoders, w1, config.M, grid, config.Of);
    qp.time_indices = select_time_basis(precoders, w1, config.T, grid, config.Ot);
    const Eigen::MatrixXcd w2 = compute_w2(precoders, w1, dft_basis(grid.Nf, config.Of, qp.freq_indices),
                                           dft_basis(grid.Nt, config.Ot, qp.time_indices));
    qp.coeffs = quantize_coeffs(prune_top_k(w2, config.K), config.amp_bits, config.phase_bits);
    return qp;
}

std::vector<CodebookConfig> desk_codebooks()
{
    //        id  L  M  T   K
    return {
        {0, 1, 1, 1, 2},
        {1, 2, 1, 1, 4},
        {2, 2, 2, 1, 8},
        {3, 4, 2, 1, 12},
        {4, 8, 4, 1, 64},
    };
}

std::vector<CodebookConfig> array256_codebooks()
{
    // Case 0 is the single-beam case; M and K are implied (one subband basis, two co-phased coefficients).
    return {
        {0, 1, 1, 1, 2},
        {1, 2, 5, 1, 10},
        {2, 2, 5, 1, 20},
        {3, 12, 5, 1, 60},
        {4, 12, 9, 1, 216},
    };
}

} // namespace cbsel
