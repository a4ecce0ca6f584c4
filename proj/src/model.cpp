#include "qcd/model.hpp"

#include <cmath>
#include <string>

namespace qcd {

std::string_view to_string(ScenarioErrorCode code) {
    switch (code) {
        case ScenarioErrorCode::non_positive_variance: return "non-positive variance";
        case ScenarioErrorCode::change_inside_pre_window: return "change inside pre-window";
        case ScenarioErrorCode::change_after_horizon: return "change after horizon";
        case ScenarioErrorCode::zero_change_gap: return "zero change gap";
        case ScenarioErrorCode::empty_horizon: return "horizon must be at least 1";
        case ScenarioErrorCode::negative_pre_window: return "negative pre-window";
        case ScenarioErrorCode::variance_mismatch: return "model variance differs from detector sigma2";
    }
    return "unknown scenario error";
}

ScenarioError::ScenarioError(ScenarioErrorCode code)
    : ValidationError(std::string(to_string(code))), code_(code) {}

void validate_probability(double p, std::string_view name) {
    if (!(p > 0.0 && p < 1.0)) {
        throw ValidationError(std::string(name) + " must lie in (0, 1), got " + std::to_string(p));
    }
}

void validate_risk(const RiskBudget& risk) {
    validate_probability(risk.delta_f, "delta_f");
    validate_probability(risk.delta_d, "delta_d");
}

void validate_scenario(const ChangeScenario& s) {
    if (s.horizon < 1) throw ScenarioError(ScenarioErrorCode::empty_horizon);
    if (!(s.pre.variance > 0.0) || !(s.post.variance > 0.0) || !std::isfinite(s.pre.variance) ||
        !std::isfinite(s.post.variance)) {
        throw ScenarioError(ScenarioErrorCode::non_positive_variance);
    }
    if (s.pre_window < 0) throw ScenarioError(ScenarioErrorCode::negative_pre_window);
    if (s.change_point) {
        const auto nu = *s.change_point;
        if (nu <= s.pre_window) throw ScenarioError(ScenarioErrorCode::change_inside_pre_window);
        if (nu > s.horizon) throw ScenarioError(ScenarioErrorCode::change_after_horizon);
        if (!(change_gap(s) > 0.0)) throw ScenarioError(ScenarioErrorCode::zero_change_gap);
    }
}

void validate_scenario(const ChangeScenario& s, double detector_sigma2, bool allow_variance_override) {
    validate_scenario(s);
    if (allow_variance_override) return;
    if (s.pre.variance != detector_sigma2 || (s.change_point && s.post.variance != detector_sigma2)) {
        throw ScenarioError(ScenarioErrorCode::variance_mismatch);
    }
}

double change_gap(const ChangeScenario& s) noexcept { return std::abs(s.pre.mean - s.post.mean); }

}  // namespace qcd
