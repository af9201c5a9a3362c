// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "kolmo/rng.hpp"

using namespace kolmo;

TEST_CASE("philox4x32-10 matches the published known-answer vectors") {
    // Random123 kat_vectors, philox4x32 rounds=10
    auto zeros = rng::philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(zeros == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

    auto ones = rng::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                {0xffffffffu, 0xffffffffu});
    CHECK(ones == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

    auto pi = rng::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                              {0xa4093822u, 0x299f31d0u});
    CHECK(pi == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("normal source is a pure function of (seed, path, step, block)") {
    rng::NormalSource src(42);
    const auto a = src.normal_pair(7, 3, 0);
    const auto b = src.normal_pair(7, 3, 0);
    CHECK(a[0] == b[0]);
    CHECK(a[1] == b[1]);
    CHECK(src.normal_pair(8, 3, 0)[0] != a[0]);
    CHECK(src.normal_pair(7, 4, 0)[0] != a[0]);
    CHECK(rng::NormalSource(43).normal_pair(7, 3, 0)[0] != a[0]);
}

TEST_CASE("fill is prefix-consistent across lengths") {
    rng::NormalSource src(1);
    std::vector<double> two(2), five(5);
    src.fill(11, 5, two);
    src.fill(11, 5, five);
    CHECK(two[0] == five[0]);
    CHECK(two[1] == five[1]);
}

TEST_CASE("normal moments") {
    rng::NormalSource src(20240901);
    const std::int64_t n = 400000;
    double sum = 0, sumsq = 0, sum4 = 0;
    std::vector<double> z(1);
    for (std::int64_t p = 0; p < n; ++p) {
        src.fill(static_cast<std::uint64_t>(p), 0, z);
        sum += z[0];
        sumsq += z[0] * z[0];
        sum4 += z[0] * z[0] * z[0] * z[0];
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    const double kurt = sum4 / n / (var * var);
    CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
    CHECK(kurt == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("uniform01 lies in [0,1) and derive_seed separates streams") {
    for (int i = 0; i < 1000; ++i) {
        const double u = rng::uniform01(5, 2, static_cast<std::uint64_t>(i));
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 100; ++i) seen.insert(rng::derive_seed(9, static_cast<std::uint64_t>(i)));
    CHECK(seen.size() == 100);
    CHECK(rng::derive_seed(9, "alpha") != rng::derive_seed(9, "beta"));
    CHECK(rng::derive_seed(9, "alpha") == rng::derive_seed(9, "alpha"));
}
