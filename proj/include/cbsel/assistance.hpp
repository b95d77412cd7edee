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

#ifndef CBSEL_ASSISTANCE_HPP
#define CBSEL_ASSISTANCE_HPP

#include "cbsel/array_channel.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace cbsel {

struct AssistanceConfig
{
    int F = 8; // RB offsets 0..F-1
    int Q = 4; // slot delays 0..Q-1
    bool complex_mode = false;
    // Measurement noise hook; +inf disables it.
    double noise_snr_db = std::numeric_limits<double>::infinity();
};

/// Normalized spatial, frequency and time correlation reports.
///
/// Values are held complex; in magnitude mode the features are |c|, in complex
/// mode each entry contributes (re, im). The mask covers the n1*n2 + F + Q base
/// entries in feature order: SDCP row-major over (dp1, dp2), FDCP, TDCP.
struct AssistanceReport
{
    Eigen::MatrixXcd sdcp; // (n1 x n2)
    Eigen::VectorXcd fdcp; // F
    Eigen::VectorXcd tdcp; // Q
    std::vector<bool> feature_mask;
    bool complex_mode = false;

    int base_size() const noexcept { return static_cast<int>(sdcp.size() + fdcp.size() + tdcp.size()); }

    Eigen::MatrixXd sdcp_magnitude() const { return sdcp.cwiseAbs(); }
    Eigen::VectorXd fdcp_magnitude() const { return fdcp.cwiseAbs(); }
    Eigen::VectorXd tdcp_magnitude() const { return tdcp.cwiseAbs(); }
};

/// Overlap-normalized correlation over port offsets (dp1, dp2) >= 0, averaged over
/// rx, RBs, slots and both polarization groups, divided by the zero-offset value.
Eigen::MatrixXcd compute_sdcp_complex(const ChannelView &channel);
Eigen::MatrixXd compute_sdcp(const ChannelView &channel);

/// Overlap-normalized correlation over RB offsets 0..F-1. Throws RangeError if F > num_rb.
Eigen::VectorXcd compute_fdcp_complex(const ChannelView &channel, int F);
Eigen::VectorXd compute_fdcp(const ChannelView &channel, int F);

/// Overlap-normalized correlation over slot delays 0..Q-1. Throws RangeError if Q > num_slot.
Eigen::VectorXcd compute_tdcp_complex(const ChannelView &channel, int Q);
Eigen::VectorXd compute_tdcp(const ChannelView &channel, int Q);

/// All three reports with a full feature mask. With finite `noise_snr_db` the
/// correlations are measured on a noisy copy drawn from `noise_seed`.
AssistanceReport compute_assistance(const ChannelView &channel, const AssistanceConfig &config,
                                    std::uint64_t noise_seed = 0);

/// Feature vector [sdcp row-major, fdcp, tdcp] with masked-out entries dropped.
Eigen::VectorXd assemble_features(const AssistanceReport &report);

/// Names matching assemble_features, e.g. "sdcp[1,0]", "fdcp[3]", "tdcp[2].im".
std::vector<std::string> feature_names(const AssistanceReport &report);

/// Mask selecting whole report groups.
std::vector<bool> group_mask(int n1, int n2, int F, int Q, bool sdcp, bool fdcp, bool tdcp);

} // namespace cbsel

#endif
