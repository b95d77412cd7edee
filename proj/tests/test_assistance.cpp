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
#include "cbsel/assistance.hpp"
#include "cbsel/errors.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

using namespace cbsel;
using cd = std::complex<double>;

namespace {

ScenarioConfig single_ray_scenario()
{
    ScenarioConfig s;
    s.num_rays = 1;
    s.doppler_max_hz = 150.0;
    s.delay_spread_s = 300e-9;
    return s;
}

// Sum_{p < N} exp(j x p)
cd geometric(double x, int N)
{
    if (std::abs(std::sin(x / 2)) < 1e-15)
        return cd(static_cast<double>(N));
    return (1.0 - std::polar(1.0, x * N)) / (1.0 - std::polar(1.0, x));
}

} // namespace

TEST_CASE("zero-offset entries are exactly one", "[assistance]")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto ch = generate_channel(ArrayGeometry{}, ScenarioConfig{}, seed);
        const auto r = compute_assistance(ch, AssistanceConfig{});
        CHECK(r.sdcp(0, 0) == cd(1.0));
        CHECK(r.fdcp(0) == cd(1.0));
        CHECK(r.tdcp(0) == cd(1.0));
    }
}

TEST_CASE("a single ray reports unit magnitude at every offset", "[assistance]")
{
    const auto ch = generate_channel(ArrayGeometry{}, single_ray_scenario(), 3);
    const auto r = compute_assistance(ch, AssistanceConfig{});
    CHECK((r.sdcp_magnitude().array() - 1.0).abs().maxCoeff() < 1e-9);
    CHECK((r.fdcp_magnitude().array() - 1.0).abs().maxCoeff() < 1e-9);
    CHECK((r.tdcp_magnitude().array() - 1.0).abs().maxCoeff() < 1e-9);
}

TEST_CASE("single-ray complex TDCP phase advances by 2 pi nu T per slot", "[assistance]")
{
    const auto ch = generate_channel(ArrayGeometry{}, single_ray_scenario(), 4);
    const auto tdcp = compute_tdcp_complex(ch, 4);
    const cd step = ch(0, 0, 0, 1) / ch(0, 0, 0, 0);
    for (int q = 1; q < 4; ++q)
        CHECK(std::abs(tdcp(q) - std::pow(step, q)) < 1e-9);
}

TEST_CASE("two equal rays match the closed-form port correlation", "[assistance]")
{
    ArrayGeometry g{4, 1, 0.5, 0.5};
    ScenarioConfig s;
    s.num_rx = 1;
    s.num_rb = 1;
    s.num_slot = 1;
    const double alpha = 2.0 * std::numbers::pi * 0.5 * std::sin(0.3);
    const double beta = 2.0 * std::numbers::pi * 0.5 * std::sin(-0.7);
    Eigen::MatrixXcd h(1, 8);
    for (int pol = 0; pol < 2; ++pol)
        for (int p = 0; p < 4; ++p)
            h(0, g.port_index(pol, p, 0)) = std::polar(1.0, alpha * p) + std::polar(1.0, beta * p);
    const ChannelRealization ch(g, s, 0, {h});

    // (1/(n-d)) sum_{p<n-d} h_{p+d} conj(h_p)
    //   = e^{j a d} + e^{j b d} + (e^{j a d} S(a-b, n-d) + e^{j b d} S(b-a, n-d)) / (n-d)
    auto corr = [&](int d) {
        const int n = 4 - d;
        return std::polar(1.0, alpha * d) + std::polar(1.0, beta * d) +
               (std::polar(1.0, alpha * d) * geometric(alpha - beta, n) +
                std::polar(1.0, beta * d) * geometric(beta - alpha, n)) /
                   static_cast<double>(n);
    };
    const auto sdcp = compute_sdcp(ch);
    for (int d = 0; d < 4; ++d)
        CHECK(sdcp(d, 0) == Catch::Approx(std::abs(corr(d) / corr(0))).margin(1e-12));
}

TEST_CASE("reports are invariant to a common complex scale", "[assistance]")
{
    const auto ch = generate_channel(ArrayGeometry{}, ScenarioConfig{}, 6);
    const auto scaled = ch.scaled(std::polar(3.7, 1.1));
    const auto a = assemble_features(compute_assistance(ch, AssistanceConfig{}));
    const auto b = assemble_features(compute_assistance(scaled, AssistanceConfig{}));
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("static channels have flat TDCP and single-tap channels flat FDCP", "[assistance]")
{
    ScenarioConfig s;
    s.doppler_max_hz = 0.0;
    const auto still = generate_channel(ArrayGeometry{}, s, 7);
    CHECK((compute_tdcp(still, 4).array() - 1.0).abs().maxCoeff() < 1e-9);

    ScenarioConfig t;
    t.delay_spread_s = 0.0;
    const auto flat = generate_channel(ArrayGeometry{}, t, 8);
    CHECK((compute_fdcp(flat, 8).array() - 1.0).abs().maxCoeff() < 1e-9);
}

TEST_CASE("wider delay spread decorrelates faster across RBs", "[assistance]")
{
    double narrow = 0.0;
    double wide = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        ScenarioConfig s;
        s.delay_spread_s = 30e-9;
        narrow += compute_fdcp(generate_channel(ArrayGeometry{}, s, seed), 8)(7);
        s.delay_spread_s = 600e-9;
        wide += compute_fdcp(generate_channel(ArrayGeometry{}, s, seed), 8)(7);
    }
    CHECK(wide < narrow);
}

TEST_CASE("feature layout, names and masks", "[assistance]")
{
    const auto ch = generate_channel(ArrayGeometry{}, ScenarioConfig{}, 9);
    AssistanceReport r = compute_assistance(ch, AssistanceConfig{});
    CHECK(r.base_size() == 20);
    const auto f = assemble_features(r);
    REQUIRE(f.size() == 20);
    const auto names = feature_names(r);
    CHECK(names.front() == "sdcp[0,0]");
    CHECK(names[1] == "sdcp[0,1]");
    CHECK(names[8] == "fdcp[0]");
    CHECK(names[16] == "tdcp[0]");
    CHECK(f(0) == 1.0);
    CHECK(f(8) == 1.0);
    CHECK(f(16) == 1.0);

    r.feature_mask = group_mask(4, 2, 8, 4, true, true, false);
    CHECK(assemble_features(r).size() == 16);
    CHECK(feature_names(r).size() == 16);

    AssistanceConfig complex_cfg;
    complex_cfg.complex_mode = true;
    const auto rc = compute_assistance(ch, complex_cfg);
    const auto fc = assemble_features(rc);
    REQUIRE(fc.size() == 40);
    CHECK(fc(2) == rc.sdcp(0, 1).real());
    CHECK(fc(3) == rc.sdcp(0, 1).imag());
    CHECK(feature_names(rc)[3] == "sdcp[0,1].im");

    r.feature_mask.pop_back();
    CHECK_THROWS_AS(assemble_features(r), ShapeError);
}

TEST_CASE("out-of-range offsets and degenerate channels are rejected", "[assistance]")
{
    const auto ch = generate_channel(ArrayGeometry{}, ScenarioConfig{}, 10);
    CHECK_THROWS_AS(compute_fdcp(ch, 25), RangeError);
    CHECK_THROWS_AS(compute_tdcp(ch, 13), RangeError);
    ScenarioConfig s;
    s.num_rb = 2;
    s.num_slot = 1;
    const ChannelRealization zero(ArrayGeometry{}, s, 0, {Eigen::MatrixXcd::Zero(2, 16), Eigen::MatrixXcd::Zero(2, 16)});
    CHECK_THROWS_AS(compute_sdcp(zero), DegenerateInputError);
}

TEST_CASE("measurement noise perturbs the report deterministically", "[assistance]")
{
    const auto ch = generate_channel(ArrayGeometry{}, ScenarioConfig{}, 11);
    AssistanceConfig noisy;
    noisy.noise_snr_db = 10.0;
    const auto clean = assemble_features(compute_assistance(ch, AssistanceConfig{}));
    const auto a = assemble_features(compute_assistance(ch, noisy, 5));
    const auto b = assemble_features(compute_assistance(ch, noisy, 5));
    const auto c = assemble_features(compute_assistance(ch, noisy, 6));
    CHECK(a == b);
    CHECK(a != c);
    CHECK((a - clean).cwiseAbs().maxCoeff() > 1e-6);
    CHECK(a(0) == 1.0);
}
