// SPDX-License-Identifier: Apache-2.0
#include "kolmo/rng.hpp"

#include <cmath>
#include <numbers>

namespace kolmo::rng {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

inline std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
inline std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

// Two 32-bit lanes -> one double in (0,1]; keeps Box-Muller's log argument
// away from zero.
inline double u01_closed(std::uint32_t a, std::uint32_t b) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(a) << 32) | b;
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t prodA = static_cast<std::uint64_t>(kMulA) * counter[0];
        const std::uint64_t prodB = static_cast<std::uint64_t>(kMulB) * counter[2];
        counter = {hi32(prodB) ^ counter[1] ^ key[0], lo32(prodB),
                   hi32(prodA) ^ counter[3] ^ key[1], lo32(prodA)};
        key[0] += kWeylA;
        key[1] += kWeylB;
    }
    return counter;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return mix64(base ^ mix64(index + 1));
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
    // FNV-1a over the tag, then mixed with the base.
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return mix64(base ^ h);
}

std::array<double, 2> NormalSource::normal_pair(std::uint64_t path, std::uint32_t step,
                                                std::uint32_t block) const {
    const auto r = philox4x32({lo32(path), hi32(path), step, block},
                              {lo32(seed_), hi32(seed_)});
    const double u1 = u01_closed(r[0], r[1]);
    const double u2 = u01_closed(r[2], r[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

void NormalSource::fill(std::uint64_t path, std::uint32_t step, std::span<double> out) const {
    std::size_t i = 0;
    std::uint32_t block = 0;
    while (i < out.size()) {
        const auto z = normal_pair(path, step, block++);
        out[i++] = z[0];
        if (i < out.size()) out[i++] = z[1];
    }
}

double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const auto r = philox4x32({lo32(index), hi32(index), lo32(stream), hi32(stream)},
                              {lo32(seed), hi32(seed)});
    const std::uint64_t bits = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace kolmo::rng
