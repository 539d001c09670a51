// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace memwalk {

/// Identifies one reproducible random stream: replica k of a run seeded with
/// master_seed uses stream_index = k. Streams are independent and any stream
/// can be constructed without generating its predecessors.
struct RngStream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

namespace detail {

struct SplitMix64 {
    std::uint64_t x;
    std::uint64_t next() {
        std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

inline std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

} // namespace detail

/// xoshiro256++ with splitmix64-based stream seeding. All outputs are pure
/// functions of (master_seed, stream_index), independent of platform.
class Rng {
public:
    explicit Rng(RngStream stream) {
        detail::SplitMix64 root{stream.master_seed};
        const std::uint64_t k0 = root.next();
        const std::uint64_t k1 = root.next();
        detail::SplitMix64 per{k0 ^ (stream.stream_index * 0x9E3779B97F4A7C15ULL + k1)};
        for (auto& w : state_) w = per.next();
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0)
            state_[0] = 0x9E3779B97F4A7C15ULL;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe under log().
    double uniform01_open() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal by the Box-Muller pair transform (second value cached).
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform01_open()));
        const double angle = 2.0 * std::numbers::pi * uniform01();
        cached_ = radius * std::sin(angle);
        has_cached_ = true;
        return radius * std::cos(angle);
    }

private:
    std::array<std::uint64_t, 4> state_{};
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace memwalk
