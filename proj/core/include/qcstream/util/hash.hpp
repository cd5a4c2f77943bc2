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
#include <span>
#include <string>
#include <string_view>
#include <type_traits>

namespace qcstream::util {

/// 64-bit FNV-1a. Used for config hashes, split manifests and snapshot checksums,
/// where a stable cross-run digest matters more than collision resistance.
class Fnv1a {
  public:
    void update(const void *data, std::size_t size) noexcept {
        const auto *bytes = static_cast<const unsigned char *>(data);
        for (std::size_t i = 0; i < size; ++i) {
            state_ ^= bytes[i];
            state_ *= kPrime;
        }
    }
    void update(std::string_view text) noexcept { update(text.data(), text.size()); }
    void update(std::span<const double> values) noexcept {
        update(values.data(), values.size_bytes());
    }
    template <typename T>
        requires std::is_trivially_copyable_v<T>
    void update_value(const T &value) noexcept {
        update(&value, sizeof(T));
    }
    [[nodiscard]] std::uint64_t digest() const noexcept { return state_; }

  private:
    static constexpr std::uint64_t kOffset = 14695981039346656037ULL;
    static constexpr std::uint64_t kPrime = 1099511628211ULL;
    std::uint64_t state_ = kOffset;
};

inline std::uint64_t fnv1a(std::string_view text) noexcept {
    Fnv1a h;
    h.update(text);
    return h.digest();
}

/// Hex rendering with fixed width, so hashes sort and compare as strings.
std::string to_hex(std::uint64_t value);

} // namespace qcstream::util
