#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>

namespace crevtax {

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Unbiased draw from [0, bound) on top of mt19937_64.
///
/// std::uniform_int_distribution is implementation-defined, so seeded
/// runs would not reproduce across standard libraries; this does.
inline std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % bound);
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return x % bound;
}

/// Fisher-Yates with bounded_draw.
template <typename Range>
void stable_shuffle(Range& range, std::mt19937_64& rng) {
    const auto n = static_cast<std::uint64_t>(range.size());
    for (std::uint64_t i = n; i > 1; --i) {
        const auto j = bounded_draw(rng, i);
        using std::swap;
        swap(range[i - 1], range[j]);
    }
}

/// Uniform double in [0, 1) with 53 random bits.
inline double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace crevtax
