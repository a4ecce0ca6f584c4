#include "qcd/random.hpp"

#include <cmath>
#include <numbers>

namespace qcd {

double NormalStream::next() {
    if (spare_) {
        const double z = *spare_;
        spare_.reset();
        return z;
    }
    constexpr double kUnit = 0x1.0p-53;
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * kUnit;  // (0, 1]
    const double u2 = static_cast<double>(engine_() >> 11) * kUnit;          // [0, 1)
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    return radius * std::cos(angle);
}

SampleStream::SampleStream(const ChangeScenario& scenario, std::uint64_t seed)
    : scenario_(scenario),
      pre_scale_(std::sqrt(scenario.pre.variance)),
      post_scale_(std::sqrt(scenario.post.variance)),
      normals_(seed) {}

double SampleStream::next() {
    ++position_;
    const double z = normals_.next();
    const bool changed = scenario_.change_point && position_ >= *scenario_.change_point;
    return changed ? scenario_.post.mean + post_scale_ * z : scenario_.pre.mean + pre_scale_ * z;
}

std::vector<double> generate_series(const ChangeScenario& scenario, std::uint64_t seed) {
    validate_scenario(scenario);
    SampleStream stream(scenario, seed);
    std::vector<double> series(static_cast<std::size_t>(scenario.horizon));
    for (auto& x : series) x = stream.next();
    return series;
}

}  // namespace qcd
