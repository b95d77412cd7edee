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

#include "cbsel/array_channel.hpp"

#include "cbsel/errors.hpp"
#include "cbsel/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cbsel {

namespace {

constexpr double deg = std::numbers::pi / 180.0;

struct Ray
{
    double power;
    double azimuth;
    double zenith;
    double delay;
    double doppler;
    Eigen::MatrixXcd gain; // (num_pol x num_rx)
};

} // namespace

void ArrayGeometry::validate() const
{
    if (n1 < 1 || n2 < 1)
        throw ConfigError("array geometry: n1 and n2 must be >= 1");
    if (!(d_h > 0.0) || !(d_v > 0.0))
        throw ConfigError("array geometry: port spacings must be positive");
}

void ScenarioConfig::validate() const
{
    if (num_rays < 1)
        throw ConfigError("scenario: num_rays must be >= 1");
    if (num_rx < 1 || num_rb < 1 || num_slot < 1)
        throw ConfigError("scenario: num_rx, num_rb and num_slot must be >= 1");
    if (delay_spread_s < 0.0 || azimuth_spread_deg < 0.0 || zenith_spread_deg < 0.0 || doppler_max_hz < 0.0)
        throw ConfigError("scenario: spreads must be non-negative");
    if (!(rb_spacing_hz > 0.0) || !(slot_duration_s > 0.0))
        throw ConfigError("scenario: rb_spacing_hz and slot_duration_s must be positive");
    if (std::isnan(rician_k_db) || rician_k_db == std::numeric_limits<double>::infinity())
        throw ConfigError("scenario: rician_k_db must be finite or -inf");
}

ChannelRealization::ChannelRealization(ArrayGeometry geometry, ScenarioConfig scenario, std::uint64_t seed,
                                       std::vector<Eigen::MatrixXcd> samples)
    : geometry_(geometry), scenario_(scenario), seed_(seed), samples_(std::move(samples))
{
    if (samples_.size() != static_cast<std::size_t>(scenario_.num_rb) * scenario_.num_slot)
        throw ShapeError("channel realization: sample count does not match num_rb * num_slot");
}

ChannelRealization ChannelRealization::scaled(std::complex<double> factor) const
{
    std::vector<Eigen::MatrixXcd> out = samples_;
    for (auto &m : out)
        m *= factor;
    return ChannelRealization(geometry_, scenario_, seed_, std::move(out));
}

ChannelView::ChannelView(const ChannelRealization &channel, int slot_begin, int num_slot)
    : channel_(&channel), slot_begin_(slot_begin), num_slot_(num_slot)
{
    if (slot_begin < 0 || num_slot < 1 || slot_begin + num_slot > channel.num_slot())
        throw RangeError("channel view: slot window out of range");
}

ChannelRealization generate_channel(const ArrayGeometry &geometry, const ScenarioConfig &scenario, std::uint64_t seed)
{
    geometry.validate();
    scenario.validate();

    CounterRng rng(derive_seed(seed, "channel"));
    const int num_rx = scenario.num_rx;
    const int num_pol = ArrayGeometry::num_pol;
    const int per_pol = geometry.ports_per_pol();

    const double center_az = rng.uniform(-60.0, 60.0) * deg;
    const double center_zen = rng.uniform(80.0, 100.0) * deg;

    const bool los = scenario.has_los();
    const double k_lin = los ? std::pow(10.0, scenario.rician_k_db / 10.0) : 0.0;
    const int nlos_rays = los ? scenario.num_rays - 1 : scenario.num_rays;

    std::vector<Ray> rays;
    rays.reserve(static_cast<std::size_t>(scenario.num_rays));
    for (int p = 0; p < scenario.num_rays; ++p) {
        const bool is_los = los && p == 0;
        Ray ray;
        if (is_los)
            ray.power = nlos_rays == 0 ? 1.0 : k_lin / (k_lin + 1.0);
        else
            ray.power = (los ? 1.0 / (k_lin + 1.0) : 1.0) / nlos_rays;

        const double az_jitter = rng.normal();
        const double zen_jitter = rng.normal();
        const double delay = rng.exponential(scenario.delay_spread_s);
        ray.doppler = rng.uniform(-scenario.doppler_max_hz, scenario.doppler_max_hz);
        if (is_los) {
            ray.azimuth = center_az;
            ray.zenith = center_zen;
            ray.delay = 0.0;
        } else {
            ray.azimuth = center_az + scenario.azimuth_spread_deg * deg * az_jitter;
            ray.zenith = center_zen + scenario.zenith_spread_deg * deg * zen_jitter;
            ray.delay = delay;
        }

        const double amp = std::sqrt(ray.power);
        ray.gain.resize(num_pol, num_rx);
        if (scenario.rank_one_gains) {
            Eigen::VectorXcd pol_part(num_pol);
            Eigen::RowVectorXcd rx_part(num_rx);
            for (int i = 0; i < num_pol; ++i)
                pol_part(i) = rng.complex_normal();
            for (int r = 0; r < num_rx; ++r)
                rx_part(r) = rng.complex_normal();
            ray.gain = amp * pol_part * rx_part;
        } else {
            for (int i = 0; i < num_pol; ++i)
                for (int r = 0; r < num_rx; ++r)
                    ray.gain(i, r) = is_los ? std::polar(amp, 2.0 * std::numbers::pi * rng.uniform())
                                            : amp * rng.complex_normal();
        }
        rays.push_back(std::move(ray));
    }

    // Spatial signature of each ray as a (num_rx x P) matrix.
    std::vector<Eigen::MatrixXcd> signatures;
    signatures.reserve(rays.size());
    for (const Ray &ray : rays) {
        const Eigen::VectorXcd a = steering_vector(geometry, ray.azimuth, ray.zenith);
        Eigen::MatrixXcd sig(num_rx, geometry.ports());
        for (int pol = 0; pol < num_pol; ++pol)
            sig.middleCols(pol * per_pol, per_pol) = ray.gain.row(pol).transpose() * a.transpose();
        signatures.push_back(std::move(sig));
    }

    const int num_rb = scenario.num_rb;
    const int num_slot = scenario.num_slot;
    std::vector<Eigen::MatrixXcd> samples(static_cast<std::size_t>(num_rb) * num_slot,
                                          Eigen::MatrixXcd::Zero(num_rx, geometry.ports()));
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t p = 0; p < rays.size(); ++p) {
        const Ray &ray = rays[p];
        for (int f = 0; f < num_rb; ++f) {
            const std::complex<double> freq_phase = std::polar(1.0, -two_pi * f * scenario.rb_spacing_hz * ray.delay);
            for (int t = 0; t < num_slot; ++t) {
                const std::complex<double> time_phase =
                    std::polar(1.0, two_pi * t * scenario.slot_duration_s * ray.doppler);
                samples[static_cast<std::size_t>(f) * num_slot + t] += (freq_phase * time_phase) * signatures[p];
            }
        }
    }

    double total = 0.0;
    std::size_t count = 0;
    for (const auto &m : samples) {
        total += m.squaredNorm();
        count += static_cast<std::size_t>(m.size());
    }
    const double mean_power = total / static_cast<double>(count);
    if (!(mean_power > 0.0) || !std::isfinite(mean_power))
        throw NumericalError("generate_channel: channel has zero or non-finite power");
    const double scale = 1.0 / std::sqrt(mean_power);
    for (auto &m : samples) {
        m *= scale;
        if (!m.allFinite())
            throw NumericalError("generate_channel: non-finite channel sample");
    }
    return ChannelRealization(geometry, scenario, seed, std::move(samples));
}

std::pair<ChannelView, ChannelView> lag_view(const ChannelRealization &channel, int delta_slots)
{
    if (delta_slots < 0 || delta_slots >= channel.num_slot())
        throw RangeError("lag_view: delay of " + std::to_string(delta_slots) + " slots needs more than " +
                         std::to_string(channel.num_slot()) + " slots");
    const int span = channel.num_slot() - delta_slots;
    return {ChannelView(channel, 0, span), ChannelView(channel, delta_slots, span)};
}

} // namespace cbsel
