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

#ifndef CBSEL_CODEBOOK_HPP
#define CBSEL_CODEBOOK_HPP

#include "cbsel/array_channel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <vector>

namespace cbsel {

/// Reporting granularity: Nf subbands of N_RB resource blocks, Nt slot groups of Ns slots.
/// Tile (k, l) maps to column k * Nt + l of every tile-level precoder matrix.
struct GridConfig
{
    int Nf = 12;
    int N_RB = 2;
    int Nt = 2;
    int Ns = 1;

    int rb_span() const noexcept { return Nf * N_RB; }
    int slot_span() const noexcept { return Nt * Ns; }
    int tiles() const noexcept { return Nf * Nt; }
    int samples() const noexcept { return Nf * Nt * N_RB * Ns; }
    int tile_index(int k, int l) const noexcept { return k * Nt + l; }

    /// Throws ConfigError unless the grid fits in num_rb x num_slot.
    void validate(int num_rb, int num_slot) const;
};

/// One candidate codebook: L spatial beams per polarization, M frequency and
/// T time basis vectors, at most K reported coefficients.
struct CodebookConfig
{
    int id = 0;
    int L = 1;
    int M = 1;
    int T = 1;
    int K = 2;
    int O1 = 4;
    int O2 = 4;
    int Of = 1;
    int Ot = 1;
    int amp_bits = 4;   // 0 = unquantized amplitude
    int phase_bits = 4; // 0 = unquantized phase

    int coefficient_slots() const noexcept { return 2 * L * M * T; }
    void validate(const ArrayGeometry &geometry, const GridConfig &grid) const;
};

/// Oversampled 2D DFT beams as columns (n1*n2 rows, n1*O1*n2*O2 columns).
/// Beam (q1, q2) sits in column q2 * n1 * O1 + q1; its entry for port (p1, p2) is
///     exp(j 2 pi (p1 q1 / (O1 n1) + p2 q2 / (O2 n2))).
/// Beams sharing (q1 mod O1, q2 mod O2) form one orthogonal family.
struct BeamGrid
{
    Eigen::MatrixXcd beams;
    int n1 = 1;
    int n2 = 1;
    int O1 = 1;
    int O2 = 1;

    int size() const noexcept { return static_cast<int>(beams.cols()); }
    int family_of(int beam) const noexcept
    {
        const int q1 = beam % (n1 * O1);
        const int q2 = beam / (n1 * O1);
        return (q2 % O2) * O1 + (q1 % O1);
    }
};

BeamGrid spatial_dft_grid(const ArrayGeometry &geometry, int O1, int O2);

/// Oversampled 1D DFT columns: entry (i, q) = exp(j 2 pi i q / (n * oversampling)).
template <typename Scalar = double>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> dft_columns(int n, int oversampling)
{
    constexpr Scalar two_pi = Scalar(6.283185307179586476925286766559);
    const int count = n * oversampling;
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> out(n, count);
    for (int q = 0; q < count; ++q)
        for (int i = 0; i < n; ++i)
            out(i, q) = std::polar(Scalar(1), two_pi * Scalar((static_cast<long long>(i) * q) % count) / Scalar(count));
    return out;
}

struct SparseCoefficient
{
    int row = 0;
    int col = 0;
    std::complex<double> value;

    friend bool operator==(const SparseCoefficient &, const SparseCoefficient &) = default;
};

/// Report content of one layer: basis indices plus the retained entries of the
/// 2L x MT coefficient matrix (row i < L on polarization 0, i >= L on polarization 1,
/// column m * T + t).
struct QuantizedPrecoder
{
    ArrayGeometry geometry;
    int O1 = 1;
    int O2 = 1;
    int Of = 1;
    int Ot = 1;
    std::vector<int> spatial_beams;
    std::vector<int> freq_indices;
    std::vector<int> time_indices;
    std::vector<SparseCoefficient> coeffs;

    int L() const noexcept { return static_cast<int>(spatial_beams.size()); }
    int rows() const noexcept { return 2 * L(); }
    int cols() const noexcept { return static_cast<int>(freq_indices.size() * time_indices.size()); }

    void validate(const GridConfig &grid) const;
};

/// Block-diagonal P x 2L spatial basis with unit-norm columns.
Eigen::MatrixXcd spatial_basis(const BeamGrid &grid, const std::vector<int> &beams);

/// n x count basis of unit-norm DFT columns (frequency or time domain).
Eigen::MatrixXcd dft_basis(int n, int oversampling, const std::vector<int> &indices);

/// Greedy spatial beam choice: for each orthogonal family keep the L beams with the
/// largest projected power of both polarization halves of `precoders` (P x S),
/// then return the best family's beams in increasing index order.
std::vector<int> select_spatial_beams(const Eigen::MatrixXcd &precoders, int L, const BeamGrid &grid);

/// Greedy frequency basis (index 0 forced) over the beam-space coefficients W1^H V.
std::vector<int> select_freq_basis(const Eigen::MatrixXcd &precoders, const Eigen::MatrixXcd &w1, int M,
                                   const GridConfig &grid, int Of);

/// Greedy time basis (index 0 forced), analogous to select_freq_basis.
std::vector<int> select_time_basis(const Eigen::MatrixXcd &precoders, const Eigen::MatrixXcd &w1, int T,
                                   const GridConfig &grid, int Ot);

/// Greedy column selection by projected power onto the growing span.
/// `signals` is n x S, `candidates` n x C with unit-norm columns. Returns sorted indices.
std::vector<int> greedy_span_selection(const Eigen::MatrixXcd &signals, const Eigen::MatrixXcd &candidates,
                                       int count, int forced);

/// Least-squares coefficients W2 minimizing || V - W1 W2 (Wf (x) Wd)^H ||_F.
Eigen::MatrixXcd compute_w2(const Eigen::MatrixXcd &precoders, const Eigen::MatrixXcd &w1, const Eigen::MatrixXcd &wf,
                            const Eigen::MatrixXcd &wd);

/// (Wf (x) Wd)^H, the MT x (Nf Nt) synthesis matrix.
Eigen::MatrixXcd synthesis_matrix(const Eigen::MatrixXcd &wf, const Eigen::MatrixXcd &wd);

/// K largest-magnitude entries; ties go to the lexicographically smaller (row, col).
/// The result is ordered by (row, col).
template <typename Derived>
std::vector<SparseCoefficient> prune_top_k(const Eigen::MatrixBase<Derived> &w2, int K);

std::vector<SparseCoefficient> quantize_coeffs(const std::vector<SparseCoefficient> &coeffs, int amp_bits,
                                               int phase_bits);

/// Tile-level precoders W1 W2 (Wf (x) Wd)^H with unit-norm columns (P x Nf Nt).
/// An all-zero column falls back to the first spatial beam on polarization 0.
Eigen::MatrixXcd reconstruct(const QuantizedPrecoder &qp, const GridConfig &grid);

/// Report size in bits:
///     L ceil(log2(n1 O1 n2 O2)) + M ceil(log2(Nf Of)) + T ceil(log2(Nt Ot))
///   + K (amp_bits + phase_bits) + K ceil(log2(2 L M T))
std::int64_t overhead_bits(const CodebookConfig &config, const ArrayGeometry &geometry, const GridConfig &grid);

/// Full quantization chain for tile-level precoders (P x Nf Nt):
/// bases, least-squares coefficients, top-K pruning, coefficient quantization.
QuantizedPrecoder quantize_precoder(const Eigen::MatrixXcd &precoders, const CodebookConfig &config,
                                    const ArrayGeometry &geometry, const GridConfig &grid);

/// Five codebooks for the 4 x 2 desk-scale array, strictly increasing in overhead.
std::vector<CodebookConfig> desk_codebooks();

/// Codebook cases 0-4 of the 256-port reference set (16 x 8 array).
std::vector<CodebookConfig> array256_codebooks();

int ceil_log2(std::int64_t n) noexcept;

// ------------------------------------------------------------------------

template <typename Derived>
std::vector<SparseCoefficient> prune_top_k(const Eigen::MatrixBase<Derived> &w2, int K)
{
    std::vector<SparseCoefficient> all;
    all.reserve(static_cast<std::size_t>(w2.size()));
    for (Eigen::Index r = 0; r < w2.rows(); ++r)
        for (Eigen::Index c = 0; c < w2.cols(); ++c)
            all.push_back({static_cast<int>(r), static_cast<int>(c), std::complex<double>(w2(r, c))});
    std::stable_sort(all.begin(), all.end(), [](const SparseCoefficient &a, const SparseCoefficient &b) {
        return std::abs(a.value) > std::abs(b.value);
    });
    if (K < static_cast<int>(all.size()))
        all.resize(static_cast<std::size_t>(std::max(K, 0)));
    std::sort(all.begin(), all.end(), [](const SparseCoefficient &a, const SparseCoefficient &b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    return all;
}

} // namespace cbsel

#endif
