#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "bmih/codes.hpp"

namespace bmih {

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::size_t n, std::size_t k);

/// Number of keys within `radius` of a `width`-bit key, saturating.
std::uint64_t ball_size(std::size_t width, std::size_t radius);

/// Visits every key at exactly Hamming distance `distance` from `center`
/// inside a `width`-bit space, flipping bit positions in lexicographic
/// combination order. Nothing is materialized.
template <typename Fn>
void for_each_key_at_distance(SubcodeKey center, std::size_t width, std::size_t distance, Fn&& fn) {
    if (distance > width) return;
    if (distance == 0) {
        fn(center);
        return;
    }
    std::array<std::uint8_t, 64> pos{};
    SubcodeKey mask = 0;
    for (std::size_t i = 0; i < distance; ++i) {
        pos[i] = static_cast<std::uint8_t>(i);
        mask |= SubcodeKey{1} << i;
    }
    for (;;) {
        fn(center ^ mask);
        std::size_t i = distance;
        while (i > 0 && pos[i - 1] == width - distance + (i - 1)) --i;
        if (i == 0) return;
        --i;
        for (std::size_t t = i; t < distance; ++t) mask &= ~(SubcodeKey{1} << pos[t]);
        ++pos[i];
        mask |= SubcodeKey{1} << pos[i];
        for (std::size_t t = i + 1; t < distance; ++t) {
            pos[t] = static_cast<std::uint8_t>(pos[t - 1] + 1);
            mask |= SubcodeKey{1} << pos[t];
        }
    }
}

/// All keys within `radius` of `key`, ordered by distance shell.
/// Throws std::invalid_argument if radius > width or width > 64.
std::vector<SubcodeKey> enumerate_ball(SubcodeKey key, std::size_t width, std::size_t radius);

}  // namespace bmih
