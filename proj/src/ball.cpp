#include "bmih/ball.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace bmih {

std::uint64_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 c = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
        if (c > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(c);
}

std::uint64_t ball_size(std::size_t width, std::size_t radius) {
    std::uint64_t total = 0;
    for (std::size_t t = 0; t <= std::min(radius, width); ++t) {
        const std::uint64_t c = binomial(width, t);
        if (c > std::numeric_limits<std::uint64_t>::max() - total) return std::numeric_limits<std::uint64_t>::max();
        total += c;
    }
    return total;
}

std::vector<SubcodeKey> enumerate_ball(SubcodeKey key, std::size_t width, std::size_t radius) {
    if (width == 0 || width > kWordBits) throw std::invalid_argument("enumerate_ball: width must be in [1, 64]");
    if (radius > width) throw std::invalid_argument("enumerate_ball: radius exceeds key width");
    std::vector<SubcodeKey> keys;
    const std::uint64_t size = ball_size(width, radius);
    if (size < (std::uint64_t{1} << 32)) keys.reserve(static_cast<std::size_t>(size));
    for (std::size_t t = 0; t <= radius; ++t) {
        for_each_key_at_distance(key, width, t, [&](SubcodeKey k) { keys.push_back(k); });
    }
    return keys;
}

}  // namespace bmih
