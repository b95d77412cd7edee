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

#include "cbsel/assistance.hpp"

#include "cbsel/errors.hpp"
#include "cbsel/rng.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace cbsel {

namespace {

using cd = std::complex<double>;

// Per-polarization overlap-normalized correlation at one port offset, averaged
// over the two polarization groups.
cd port_correlation(const ChannelView &ch, int dp1, int dp2)
{
    const ArrayGeometry &g = ch.geometry();
    cd acc_pol[ArrayGeometry::num_pol] = {};
    for (int pol = 0; pol < ArrayGeometry::num_pol; ++pol) {
        cd acc = 0.0;
        std::size_t count = 0;
        for (int f = 0; f < ch.num_rb(); ++f)
            for (int t = 0; t < ch.num_slot(); ++t) {
                const Eigen::MatrixXcd &h = ch.at(f, t);
                for (int p2 = 0; p2 + dp2 < g.n2; ++p2)
                    for (int p1 = 0; p1 + dp1 < g.n1; ++p1) {
                        const int a = g.port_index(pol, p1 + dp1, p2 + dp2);
                        const int b = g.port_index(pol, p1, p2);
                        acc += (h.col(a).array() * h.col(b).array().conjugate()).sum();
                        count += static_cast<std::size_t>(h.rows());
                    }
            }
        acc_pol[pol] = acc / static_cast<double>(count);
    }
    return 0.5 * (acc_pol[0] + acc_pol[1]);
}

cd rb_correlation(const ChannelView &ch, int df)
{
    cd acc = 0.0;
    std::size_t count = 0;
    for (int f = 0; f + df < ch.num_rb(); ++f)
        for (int t = 0; t < ch.num_slot(); ++t) {
            acc += (ch.at(f + df, t).array() * ch.at(f, t).array().conjugate()).sum();
            count += static_cast<std::size_t>(ch.at(f, t).size());
        }
    return acc / static_cast<double>(count);
}

cd slot_correlation(const ChannelView &ch, int dt)
{
    cd acc = 0.0;
    std::size_t count = 0;
    for (int f = 0; f < ch.num_rb(); ++f)
        for (int t = 0; t + dt < ch.num_slot(); ++t) {
            acc += (ch.at(f, t + dt).array() * ch.at(f, t).array().conjugate()).sum();
            count += static_cast<std::size_t>(ch.at(f, t).size());
        }
    return acc / static_cast<double>(count);
}

void check_zero_lag(cd zero, const char *what)
{
    if (!(std::abs(zero) > 0.0) || !std::isfinite(zero.real()))
        throw DegenerateInputError(std::string(what) + ": zero-offset correlation vanishes");
}

} // namespace

Eigen::MatrixXcd compute_sdcp_complex(const ChannelView &channel)
{
    const ArrayGeometry &g = channel.geometry();
    const cd zero = port_correlation(channel, 0, 0);
    check_zero_lag(zero, "compute_sdcp");
    Eigen::MatrixXcd out(g.n1, g.n2);
    for (int d1 = 0; d1 < g.n1; ++d1)
        for (int d2 = 0; d2 < g.n2; ++d2)
            out(d1, d2) = (d1 == 0 && d2 == 0) ? cd(1.0) : port_correlation(channel, d1, d2) / zero;
    return out;
}

Eigen::MatrixXd compute_sdcp(const ChannelView &channel) { return compute_sdcp_complex(channel).cwiseAbs(); }

Eigen::VectorXcd compute_fdcp_complex(const ChannelView &channel, int F)
{
    if (F < 1 || F > channel.num_rb())
        throw RangeError("compute_fdcp: F = " + std::to_string(F) + " outside [1, " + std::to_string(channel.num_rb()) +
                         "]");
    const cd zero = rb_correlation(channel, 0);
    check_zero_lag(zero, "compute_fdcp");
    Eigen::VectorXcd out(F);
    out(0) = 1.0;
    for (int d = 1; d < F; ++d)
        out(d) = rb_correlation(channel, d) / zero;
    return out;
}

Eigen::VectorXd compute_fdcp(const ChannelView &channel, int F) { return compute_fdcp_complex(channel, F).cwiseAbs(); }

Eigen::VectorXcd compute_tdcp_complex(const ChannelView &channel, int Q)
{
    if (Q < 1 || Q > channel.num_slot())
        throw RangeError("compute_tdcp: Q = " + std::to_string(Q) + " outside [1, " +
                         std::to_string(channel.num_slot()) + "]");
    const cd zero = slot_correlation(channel, 0);
    check_zero_lag(zero, "compute_tdcp");
    Eigen::VectorXcd out(Q);
    out(0) = 1.0;
    for (int d = 1; d < Q; ++d)
        out(d) = slot_correlation(channel, d) / zero;
    return out;
}

Eigen::VectorXd compute_tdcp(const ChannelView &channel, int Q) { return compute_tdcp_complex(channel, Q).cwiseAbs(); }

AssistanceReport compute_assistance(const ChannelView &channel, const AssistanceConfig &config,
                                    std::uint64_t noise_seed)
{
    auto fill = [&](const ChannelView &view) {
        AssistanceReport r;
        r.sdcp = compute_sdcp_complex(view);
        r.fdcp = compute_fdcp_complex(view, config.F);
        r.tdcp = compute_tdcp_complex(view, config.Q);
        r.complex_mode = config.complex_mode;
        r.feature_mask.assign(static_cast<std::size_t>(r.base_size()), true);
        return r;
    };

    if (!std::isfinite(config.noise_snr_db))
        return fill(channel);

    // Noisy measurement copy; the channel has unit mean power by construction.
    const double sigma = std::sqrt(std::pow(10.0, -config.noise_snr_db / 10.0));
    CounterRng rng(derive_seed(noise_seed, "assistance-noise"));
    std::vector<Eigen::MatrixXcd> noisy;
    noisy.reserve(static_cast<std::size_t>(channel.num_rb()) * channel.num_slot());
    for (int f = 0; f < channel.num_rb(); ++f)
        for (int t = 0; t < channel.num_slot(); ++t) {
            Eigen::MatrixXcd m = channel.at(f, t);
            for (Eigen::Index i = 0; i < m.size(); ++i)
                m.data()[i] += sigma * rng.complex_normal();
            noisy.push_back(std::move(m));
        }
    ScenarioConfig sc = channel.channel().scenario();
    sc.num_slot = channel.num_slot();
    const ChannelRealization copy(channel.geometry(), sc, channel.channel().seed(), std::move(noisy));
    return fill(copy);
}

Eigen::VectorXd assemble_features(const AssistanceReport &report)
{
    const int base = report.base_size();
    if (static_cast<int>(report.feature_mask.size()) != base)
        throw ShapeError("assemble_features: mask length must equal n1*n2 + F + Q");

    std::vector<std::complex<double>> values;
    values.reserve(static_cast<std::size_t>(base));
    for (Eigen::Index i = 0; i < report.sdcp.rows(); ++i)
        for (Eigen::Index j = 0; j < report.sdcp.cols(); ++j)
            values.push_back(report.sdcp(i, j));
    for (Eigen::Index i = 0; i < report.fdcp.size(); ++i)
        values.push_back(report.fdcp(i));
    for (Eigen::Index i = 0; i < report.tdcp.size(); ++i)
        values.push_back(report.tdcp(i));

    std::vector<double> out;
    for (int i = 0; i < base; ++i) {
        if (!report.feature_mask[static_cast<std::size_t>(i)])
            continue;
        const auto v = values[static_cast<std::size_t>(i)];
        if (report.complex_mode) {
            out.push_back(v.real());
            out.push_back(v.imag());
        } else {
            out.push_back(std::abs(v));
        }
    }
    return Eigen::Map<const Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

std::vector<std::string> feature_names(const AssistanceReport &report)
{
    std::vector<std::string> base;
    for (Eigen::Index i = 0; i < report.sdcp.rows(); ++i)
        for (Eigen::Index j = 0; j < report.sdcp.cols(); ++j)
            base.push_back("sdcp[" + std::to_string(i) + "," + std::to_string(j) + "]");
    for (Eigen::Index i = 0; i < report.fdcp.size(); ++i)
        base.push_back("fdcp[" + std::to_string(i) + "]");
    for (Eigen::Index i = 0; i < report.tdcp.size(); ++i)
        base.push_back("tdcp[" + std::to_string(i) + "]");

    std::vector<std::string> out;
    for (std::size_t i = 0; i < base.size(); ++i) {
        if (i < report.feature_mask.size() && !report.feature_mask[i])
            continue;
        if (report.complex_mode) {
            out.push_back(base[i] + ".re");
            out.push_back(base[i] + ".im");
        } else {
            out.push_back(base[i]);
        }
    }
    return out;
}

std::vector<bool> group_mask(int n1, int n2, int F, int Q, bool sdcp, bool fdcp, bool tdcp)
{
    std::vector<bool> mask;
    mask.insert(mask.end(), static_cast<std::size_t>(n1 * n2), sdcp);
    mask.insert(mask.end(), static_cast<std::size_t>(F), fdcp);
    mask.insert(mask.end(), static_cast<std::size_t>(Q), tdcp);
    return mask;
}

} // namespace cbsel
