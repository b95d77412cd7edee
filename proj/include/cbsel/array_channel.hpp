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

#ifndef CBSEL_ARRAY_CHANNEL_HPP
#define CBSEL_ARRAY_CHANNEL_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace cbsel {

/// Cross-polarized N1 x N2 port array. Ports are flattened polarization-major,
/// then along the second (vertical) dimension, then the first:
///     port = pol * n1 * n2 + p2 * n1 + p1
/// The same (p2, p1) order is used for steering vectors and DFT beams.
struct ArrayGeometry
{
    static constexpr int num_pol = 2;

    int n1 = 4;
    int n2 = 2;
    double d_h = 0.5; // wavelengths
    double d_v = 0.5;

    int ports_per_pol() const noexcept { return n1 * n2; }
    int ports() const noexcept { return num_pol * n1 * n2; }
    int port_index(int pol, int p1, int p2) const noexcept { return pol * n1 * n2 + p2 * n1 + p1; }

    void validate() const;
};

/// Parametric geometric multipath scenario.
///
/// Per realization a cluster centre is drawn uniformly over azimuth [-60, 60] deg
/// and zenith [80, 100] deg. Ray angles scatter around it with Gaussian spreads,
/// delays are exponential with mean `delay_spread_s`, Doppler shifts are uniform
/// on [-doppler_max_hz, doppler_max_hz]. A finite `rician_k_db` adds a LoS ray
/// at the cluster centre with zero delay carrying power K/(K+1).
struct ScenarioConfig
{
    int num_rays = 20;
    double rician_k_db = -std::numeric_limits<double>::infinity();
    double delay_spread_s = 100e-9;
    double azimuth_spread_deg = 10.0;
    double zenith_spread_deg = 3.0;
    double doppler_max_hz = 20.0;
    int num_rx = 2;
    double rb_spacing_hz = 360e3;
    double slot_duration_s = 0.5e-3;
    int num_rb = 24;
    int num_slot = 12;

    // Per-ray gains form an outer product of an rx vector and a polarization
    // vector, so a single ray yields a rank-1 channel matrix.
    bool rank_one_gains = false;

    bool has_los() const noexcept { return rician_k_db > -std::numeric_limits<double>::infinity(); }
    void validate() const;
};

/// Channel tensor h[rx, port, rb, slot], stored as one (num_rx x P) matrix per (rb, slot).
class ChannelRealization
{
  public:
    ChannelRealization(ArrayGeometry geometry, ScenarioConfig scenario, std::uint64_t seed,
                       std::vector<Eigen::MatrixXcd> samples);

    const Eigen::MatrixXcd &at(int rb, int slot) const { return samples_[static_cast<std::size_t>(rb) * scenario_.num_slot + slot]; }
    std::complex<double> operator()(int rx, int port, int rb, int slot) const { return at(rb, slot)(rx, port); }

    const ArrayGeometry &geometry() const noexcept { return geometry_; }
    const ScenarioConfig &scenario() const noexcept { return scenario_; }
    std::uint64_t seed() const noexcept { return seed_; }

    int num_rx() const noexcept { return scenario_.num_rx; }
    int num_ports() const noexcept { return geometry_.ports(); }
    int num_rb() const noexcept { return scenario_.num_rb; }
    int num_slot() const noexcept { return scenario_.num_slot; }

    const std::vector<Eigen::MatrixXcd> &samples() const noexcept { return samples_; }

    /// Returns a copy with every sample multiplied by `factor`.
    ChannelRealization scaled(std::complex<double> factor) const;

  private:
    ArrayGeometry geometry_;
    ScenarioConfig scenario_;
    std::uint64_t seed_;
    std::vector<Eigen::MatrixXcd> samples_;
};

/// Non-owning window over a contiguous slot range of a realization.
/// The realization must outlive the view.
class ChannelView
{
  public:
    ChannelView(const ChannelRealization &channel) // NOLINT: implicit full view
        : channel_(&channel), slot_begin_(0), num_slot_(channel.num_slot()) {}
    ChannelView(const ChannelRealization &channel, int slot_begin, int num_slot);

    const Eigen::MatrixXcd &at(int rb, int slot) const { return channel_->at(rb, slot_begin_ + slot); }
    std::complex<double> operator()(int rx, int port, int rb, int slot) const { return at(rb, slot)(rx, port); }

    const ChannelRealization &channel() const noexcept { return *channel_; }
    const ArrayGeometry &geometry() const noexcept { return channel_->geometry(); }
    int slot_begin() const noexcept { return slot_begin_; }
    int num_rx() const noexcept { return channel_->num_rx(); }
    int num_ports() const noexcept { return channel_->num_ports(); }
    int num_rb() const noexcept { return channel_->num_rb(); }
    int num_slot() const noexcept { return num_slot_; }

  private:
    const ChannelRealization *channel_;
    int slot_begin_;
    int num_slot_;
};

/// Unit-modulus response of one polarization group, indexed p2 * n1 + p1:
///     exp(j 2 pi (d_h p1 sin(zenith) sin(azimuth) + d_v p2 cos(zenith)))
template <typename Scalar = double>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> steering_vector(const ArrayGeometry &geometry, Scalar azimuth_rad,
                                                                       Scalar zenith_rad)
{
    using std::cos;
    using std::sin;
    constexpr Scalar two_pi = Scalar(6.283185307179586476925286766559);
    const Scalar u = geometry.d_h * sin(zenith_rad) * sin(azimuth_rad);
    const Scalar v = geometry.d_v * cos(zenith_rad);
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> a(geometry.ports_per_pol());
    for (int p2 = 0; p2 < geometry.n2; ++p2)
        for (int p1 = 0; p1 < geometry.n1; ++p1)
            a(p2 * geometry.n1 + p1) = std::polar(Scalar(1), two_pi * (u * Scalar(p1) + v * Scalar(p2)));
    return a;
}

/// Draws one realization. Deterministic in (geometry, scenario, seed); the
/// result is normalized so the mean of |h|^2 over all entries is 1.
ChannelRealization generate_channel(const ArrayGeometry &geometry, const ScenarioConfig &scenario, std::uint64_t seed);

/// (stale, fresh) slot windows for a reporting delay: stale covers
/// [0, num_slot - delta), fresh covers [delta, num_slot).
std::pair<ChannelView, ChannelView> lag_view(const ChannelRealization &channel, int delta_slots);

} // namespace cbsel

#endif
