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
#include "cbsel/rng.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

using namespace cbsel;

TEST_CASE("splitmix64 finalizer matches the reference generator", "[rng]")
{
    // Reference SplitMix64 seeded with 0 yields these first two outputs.
    constexpr std::uint64_t gamma = 0x9E3779B97F4A7C15ULL;
    CHECK(splitmix64_mix(gamma) == 0xE220A8397B1DCDAFULL);
    CHECK(splitmix64_mix(2 * gamma) == 0x6E789E6AA1B965F4ULL);
}

TEST_CASE("fnv1a64 matches published test vectors", "[rng]")
{
    CHECK(fnv1a64("") == 0xCBF29CE484222325ULL);
    CHECK(fnv1a64("a") == 0xAF63DC4C8601EC8CULL);
    CHECK(fnv1a64("foobar") == 0x85944171F73967E8ULL);
}

TEST_CASE("counter stream is the finalizer of key plus counter times gamma", "[rng]")
{
    constexpr std::uint64_t gamma = 0x9E3779B97F4A7C15ULL;
    const std::uint64_t key = 12345;
    CounterRng rng(key);
    const std::uint64_t mixed = splitmix64_mix(key);
    for (std::uint64_t i = 1; i <= 5; ++i)
        CHECK(rng.next_u64() == splitmix64_mix(mixed + i * gamma));
    CHECK(rng.counter() == 5);
}

TEST_CASE("derived seeds separate purposes and indices", "[rng]")
{
    std::set<std::uint64_t> seen;
    for (const char *purpose : {"scenario", "realization", "split", "train"})
        for (std::uint64_t i = 0; i < 50; ++i)
            seen.insert(derive_seed(7, purpose, i));
    CHECK(seen.size() == 200);
    CHECK(derive_seed(7, "train", 3) == derive_seed(7, "train", 3));
    CHECK(derive_seed(7, "train", 3) != derive_seed(8, "train", 3));
}

TEST_CASE("uniform draws lie in [0, 1) with the right moments", "[rng]")
{
    CounterRng rng(1);
    const int n = 200000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    const double mean = sum / n;
    CHECK(mean == Catch::Approx(0.5).margin(5e-3));
    CHECK(sum2 / n - mean * mean == Catch::Approx(1.0 / 12.0).margin(2e-3));
}

TEST_CASE("below is bounded and roughly uniform", "[rng]")
{
    CounterRng rng(2);
    std::vector<int> counts(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) {
        const auto v = rng.below(7);
        REQUIRE(v < 7);
        ++counts[v];
    }
    for (int c : counts)
        CHECK(std::abs(c - n / 7) < 500);
}

TEST_CASE("normal, exponential and complex normal moments", "[rng]")
{
    CounterRng rng(3);
    const int n = 200000;
    double s = 0, s2 = 0, e = 0, c2 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        s += x;
        s2 += x * x;
        e += rng.exponential(2.5);
        c2 += std::norm(rng.complex_normal());
    }
    CHECK(s / n == Catch::Approx(0.0).margin(0.01));
    CHECK(s2 / n == Catch::Approx(1.0).margin(0.02));
    CHECK(e / n == Catch::Approx(2.5).margin(0.03));
    CHECK(c2 / n == Catch::Approx(1.0).margin(0.02));
    CHECK(rng.exponential(0.0) == 0.0);
}

TEST_CASE("identical keys give identical streams", "[rng]")
{
    CounterRng a(99);
    CounterRng b(99);
    for (int i = 0; i < 100; ++i)
        CHECK(a.normal() == b.normal());
}
