// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace kolmo::rng {

// Philox 4x32-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3", SC 2011). Stateless: every 128-bit output
// block is a pure function of (counter, key), so a stream keyed by
// (seed, path, step) is independent of how work is scheduled.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// SplitMix64 finalizer; used to derive per-node / per-check seeds.
std::uint64_t mix64(std::uint64_t x);

// Seed for a derived stream (grid node, suite check, ...). Stable across runs.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);

/// Draws N(0,1) variates addressed by (path, step). Each (path, step, block)
/// triple yields two normals via one Philox block and the Box-Muller map.
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : seed_(seed) {}

    std::array<double, 2> normal_pair(std::uint64_t path, std::uint32_t step,
                                      std::uint32_t block) const;

    /// Fills `out` (any length) with the normals for (path, step).
    void fill(std::uint64_t path, std::uint32_t step, std::span<double> out) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

/// Uniform in [0,1) addressed by (stream, index); for sampling boxes and pairs
/// in the assumption validator.
double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

}  // namespace kolmo::rng
