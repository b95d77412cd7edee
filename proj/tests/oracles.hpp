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
// Independent reference implementations used by the unit and acceptance tests.
// They favour literal transcription of the rules over efficiency.

#ifndef CBSEL_TESTS_ORACLES_HPP
#define CBSEL_TESTS_ORACLES_HPP

#include "cbsel/codebook.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <span>
#include <tuple>
#include <vector>

namespace oracle {

/// Sort every entry by (-|value|, row, col), keep K, re-sort by (row, col).
inline std::vector<cbsel::SparseCoefficient> sort_and_slice(const Eigen::MatrixXcd &w2, int K)
{
    std::vector<std::tuple<double, int, int>> entries;
    for (int r = 0; r < w2.rows(); ++r)
        for (int c = 0; c < w2.cols(); ++c)
            entries.emplace_back(-std::abs(w2(r, c)), r, c);
    std::sort(entries.begin(), entries.end());
    entries.resize(static_cast<std::size_t>(std::min<Eigen::Index>(K, w2.size())));
    std::sort(entries.begin(), entries.end(),
              [](const auto &a, const auto &b) { return std::tie(std::get<1>(a), std::get<2>(a)) < std::tie(std::get<1>(b), std::get<2>(b)); });
    std::vector<cbsel::SparseCoefficient> out;
    for (const auto &[neg, r, c] : entries)
        out.push_back({r, c, w2(r, c)});
    return out;
}

/// Least squares via the vectorized problem vec(W1 X Z) = (Z^T kron W1) vec(X),
/// solved with the normal equations A^H A x = A^H b.
inline Eigen::MatrixXcd normal_equation_w2(const Eigen::MatrixXcd &v, const Eigen::MatrixXcd &w1,
                                           const Eigen::MatrixXcd &z)
{
    const Eigen::Index p = w1.rows();
    const Eigen::Index a_cols = w1.cols();
    const Eigen::Index b_rows = z.rows();
    const Eigen::Index n = z.cols();
    Eigen::MatrixXcd A(p * n, a_cols * b_rows);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < b_rows; ++k)
            A.block(j * p, k * a_cols, p, a_cols) = z(k, j) * w1;
    Eigen::VectorXcd b(p * n);
    for (Eigen::Index j = 0; j < n; ++j)
        b.segment(j * p, p) = v.col(j);
    const Eigen::MatrixXcd normal = A.adjoint() * A;
    const Eigen::VectorXcd x = normal.fullPivLu().solve(A.adjoint() * b);
    Eigen::MatrixXcd out(a_cols, b_rows);
    for (Eigen::Index k = 0; k < b_rows; ++k)
        out.col(k) = x.segment(k * a_cols, a_cols);
    return out;
}

/// Projected power of both polarization halves onto unit-norm beams `chosen`.
inline double beam_power(const Eigen::MatrixXcd &precoders, const cbsel::BeamGrid &grid, const std::vector<int> &chosen)
{
    const Eigen::Index n = grid.beams.rows();
    double total = 0.0;
    for (int b : chosen) {
        const Eigen::VectorXcd beam = grid.beams.col(b) / std::sqrt(static_cast<double>(n));
        total += (beam.adjoint() * precoders.topRows(n)).squaredNorm() +
                 (beam.adjoint() * precoders.bottomRows(n)).squaredNorm();
    }
    return total;
}

/// Best projected power over every L-subset of beams that share one orthogonal family.
inline double exhaustive_beam_power(const Eigen::MatrixXcd &precoders, const cbsel::BeamGrid &grid, int L)
{
    const int total = static_cast<int>(grid.beams.cols());
    double best = 0.0;
    std::vector<int> pick(static_cast<std::size_t>(L));
    auto family = [&](int b) {
        const int g1 = grid.n1 * grid.O1;
        return std::pair<int, int>{(b % g1) % grid.O1, (b / g1) % grid.O2};
    };
    auto recurse = [&](auto &&self, int start, int depth) -> void {
        if (depth == L) {
            for (int i = 1; i < L; ++i)
                if (family(pick[static_cast<std::size_t>(i)]) != family(pick[0]))
                    return;
            best = std::max(best, beam_power(precoders, grid, pick));
            return;
        }
        for (int b = start; b < total; ++b) {
            pick[static_cast<std::size_t>(depth)] = b;
            self(self, b + 1, depth + 1);
        }
    };
    recurse(recurse, 0, 0);
    return best;
}

/// First index reaching rho_min, else the first maximum.
inline int threshold_first(std::span<const double> preds, double rho_min)
{
    for (std::size_t i = 0; i < preds.size(); ++i)
        if (preds[i] >= rho_min)
            return static_cast<int>(i);
    int best = 0;
    for (std::size_t i = 1; i < preds.size(); ++i)
        if (preds[i] > preds[static_cast<std::size_t>(best)])
            best = static_cast<int>(i);
    return best;
}

/// Feasible set by the literal gain rule; argmax over it, or the reference when empty.
inline int reference_gain(std::span<const double> preds, int ref, std::span<const double> rho0)
{
    std::vector<int> feasible;
    std::size_t k = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (static_cast<int>(i) == ref)
            continue;
        if (preds[i] - preds[static_cast<std::size_t>(ref)] >= rho0[k])
            feasible.push_back(static_cast<int>(i));
        ++k;
    }
    if (feasible.empty())
        return ref;
    int best = feasible.front();
    for (int i : feasible)
        if (preds[static_cast<std::size_t>(i)] > preds[static_cast<std::size_t>(best)])
            best = i;
    return best;
}

} // namespace oracle

#endif
