#pragma once

#include <cstdint>
#include <vector>

#include "qcd/thresholds.hpp"

namespace qcd {

/// Inputs to the latency and pre-window guarantees. `kind` must be one of the
/// four generalized families; `pre_window` is only read by the two-sided bounds.
struct BoundInputs {
    std::int64_t horizon = 1;
    double delta_f = 0.01;
    double delta_d = 0.01;
    double sigma2 = 1.0;
    double gap = 1.0;
    std::int64_t pre_window = 0;
    ThresholdFamily kind = ThresholdFamily::glr_post;
};

void validate_bound_inputs(const BoundInputs& b);

/// beta(T, delta_f) for the selected generalized family.
double horizon_threshold(const BoundInputs& b);

/// Latency guarantee when the pre-change mean is known:
/// ceil(2 sigma2 / gap^2 * (sqrt(beta) + sqrt(log(2 / delta_d)))^2).
std::int64_t latency_bound_known_pre(const BoundInputs& b);

/// Smallest pre-window the two-sided guarantee admits: ceil(8 sigma2 beta / gap^2).
std::int64_t min_prewindow(const BoundInputs& b);

/// Latency guarantee when both means are unknown. Throws ValidationError
/// ("pre-window too small") unless gap^2 m > 8 sigma2 beta.
std::int64_t latency_bound_both_unknown(const BoundInputs& b);

/// Pre-window choice ceil(16 sigma2 beta / gap^2 + log(1 / delta_d)).
std::int64_t prewindow_cor1(const BoundInputs& b);

struct LatencyPoint {
    std::int64_t horizon = 1;
    double delta_f = 0.01;
    double delta_d = 0.01;
    double latency = 0.0;
};

struct GrowthReport {
    double intercept = 0.0;
    double slope = 0.0;
    /// max over points of latency / fitted value
    double max_ratio = 0.0;
    /// OLS slope of the per-point ratio against log T
    double ratio_trend = 0.0;
    bool super_logarithmic = false;
};

/// Diagnostic for latency = O(log T + log 1/delta_f + log 1/delta_d).
///
/// Fits latency = a + b x with x = log T + log(1/delta_f) + log(1/delta_d)
/// by ordinary least squares, then regresses latency / fit on log T. The
/// flag is raised when that trend changes the ratio by more than 25% across
/// the horizon range. Points with a nonpositive fitted value are left out of
/// the ratio statistics.
GrowthReport property1_check(const std::vector<LatencyPoint>& points);

inline constexpr double kSuperLogTolerance = 0.25;

}  // namespace qcd
