#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "qcd/errors.hpp"

namespace qcd {

/// Gaussian observation model with mean and variance sigma^2.
struct GaussianModel {
    double mean = 0.0;
    double variance = 1.0;

    friend bool operator==(const GaussianModel&, const GaussianModel&) = default;
};

/// False-alarm and late-detection budgets, each in (0, 1).
struct RiskBudget {
    double delta_f = 0.01;
    double delta_d = 0.01;
};

void validate_risk(const RiskBudget& risk);
void validate_probability(double p, std::string_view name);

/// A single-change stream over steps 1..horizon.
///
/// Time is 1-based: when `change_point` holds nu, X_nu is the first
/// post-change observation. An empty `change_point` means no change occurs
/// within the horizon. The first `pre_window` samples are guaranteed to be
/// change free.
struct ChangeScenario {
    std::int64_t horizon = 1;
    std::optional<std::int64_t> change_point;
    std::int64_t pre_window = 0;
    GaussianModel pre;
    GaussianModel post;
};

enum class ScenarioErrorCode {
    non_positive_variance,
    change_inside_pre_window,
    change_after_horizon,
    zero_change_gap,
    empty_horizon,
    negative_pre_window,
    variance_mismatch,
};

std::string_view to_string(ScenarioErrorCode code);

class ScenarioError : public ValidationError {
public:
    explicit ScenarioError(ScenarioErrorCode code);
    ScenarioErrorCode code() const noexcept { return code_; }

private:
    ScenarioErrorCode code_;
};

/// Throws ScenarioError naming the first violated invariant.
void validate_scenario(const ChangeScenario& scenario);

/// As above, and additionally requires both model variances to equal the
/// detector's sigma^2 unless `allow_variance_override` is set.
void validate_scenario(const ChangeScenario& scenario, double detector_sigma2,
                       bool allow_variance_override);

/// |pre.mean - post.mean|. Does not validate.
double change_gap(const ChangeScenario& scenario) noexcept;

}  // namespace qcd
