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

#ifndef CBSEL_RNG_HPP
#define CBSEL_RNG_HPP

#include <complex>
#include <cstdint>
#include <string_view>

namespace cbsel {

/// SplitMix64 output function (Steele, Lea, Flood 2014).
std::uint64_t splitmix64_mix(std::uint64_t x) noexcept;

/// 64-bit FNV-1a hash, used to turn purpose names into stream tags.
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// Per-purpose seed derivation: mix(seed ^ mix(tag ^ mix(index))).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose, std::uint64_t index = 0) noexcept;

/// Counter-based generator: the i-th draw is splitmix64_mix(key + i * 0x9E3779B97F4A7C15).
/// Equal keys produce equal streams on every platform.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key) noexcept : key_(splitmix64_mix(key)) {}

    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept;

    /// Standard normal via Box-Muller (one variate per two uniforms).
    double normal() noexcept;

    /// Exponential with the given mean; mean 0 returns 0.
    double exponential(double mean) noexcept;

    /// Circularly-symmetric complex normal with unit variance.
    std::complex<double> complex_normal() noexcept;

    std::uint64_t counter() const noexcept { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace cbsel

#endif
