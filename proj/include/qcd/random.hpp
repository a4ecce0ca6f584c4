#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "qcd/model.hpp"

namespace qcd {

/// SplitMix64 finalizer: a bijective 64-bit avalanche mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Per-trial seed, a pure function of its three coordinates.
constexpr std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t lane, std::uint64_t trial) noexcept {
    return mix64(mix64(mix64(base_seed) ^ lane) ^ trial);
}

/// Lane used for no-change (false-alarm) trials.
inline constexpr std::uint64_t kNoChangeLane = 0xFA15E0A1A4A11A5EULL;

/// Standard normal variates: std::mt19937_64 words mapped to uniforms and
/// paired through Box-Muller (cosine branch first, then sine).
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    double next();

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// Lazily generated observations X_1, X_2, ... of a change scenario.
class SampleStream {
public:
    SampleStream(const ChangeScenario& scenario, std::uint64_t seed);

    double next();
    std::int64_t position() const noexcept { return position_; }

private:
    ChangeScenario scenario_;
    double pre_scale_;
    double post_scale_;
    NormalStream normals_;
    std::int64_t position_ = 0;
};

/// Length-T realisation of the scenario; validates it first.
std::vector<double> generate_series(const ChangeScenario& scenario, std::uint64_t seed);

}  // namespace qcd
