// Copyright 2026 The qcstream Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

namespace qcstream::util {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; spreads nearby seeds across the 64-bit space.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and a list of tags
/// (task index, step, purpose code...). Every stochastic consumer takes its seed
/// this way so that nothing depends on call order.
constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> tags) noexcept {
    std::uint64_t s = mix_seed(base);
    for (auto t : tags) {
        s = mix_seed(s ^ mix_seed(t + 0x632BE59BD9B4E019ULL));
    }
    return s;
}

/// Purpose codes for derive_seed.
enum class Stream : std::uint64_t {
    kInit = 1,
    kBatchOrder,
    kReplay,
    kSpsa,
    kAnchors,
    kAnchorSubsample,
    kThreshold,
    kGenerator,
    kShots,
    kSynthetic,
    kGmm,
};

constexpr std::uint64_t tag(Stream s) noexcept { return static_cast<std::uint64_t>(s); }

/// Fisher-Yates with a plain modulo draw, so the permutation for a given seed
/// does not depend on the standard library's distribution implementation.
template <typename T>
void shuffle(std::vector<T> &v, Rng &rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace qcstream::util
