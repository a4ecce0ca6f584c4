#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qcd/detectors.hpp"
#include "qcd/model.hpp"

namespace qcd {

struct DetectorConfig {
    DetectorKind kind;
    double delta_f = 0.01;
};

/// Test hook: fires exactly `delay` steps after the change (never when there
/// is no change, nor past the horizon).
struct FixedDelayOracle {
    std::int64_t delay = 0;
};

using TrialDetector = std::variant<DetectorConfig, FixedDelayOracle>;

std::string detector_label(const TrialDetector& detector);

enum class TrialOutcome { detected, false_alarm, censored };

struct TrialRecord {
    std::uint64_t seed = 0;
    std::optional<std::int64_t> change_point;
    std::optional<std::int64_t> fired_at;
    TrialOutcome outcome = TrialOutcome::censored;
    std::int64_t delay = 0;  // fired_at - nu; meaningful only when detected
};

TrialRecord classify_trial(std::uint64_t seed, std::optional<std::int64_t> change_point,
                           std::optional<std::int64_t> fired_at);

/// Runs one trial on a freshly generated stream and classifies its outcome.
TrialRecord run_trial(const TrialDetector& detector, const ChangeScenario& scenario, std::uint64_t seed);

/// {m + 1 + floor(n T / 10) : n = 0, 1, ...} truncated at T, ascending and
/// without duplicates.
std::vector<std::int64_t> changepoint_grid(std::int64_t horizon, std::int64_t pre_window);

/// Element at 1-based index ceil(q N) of an ascending sequence.
std::int64_t nearest_rank_percentile(const std::vector<std::int64_t>& sorted, double q);

struct ExperimentPlan {
    TrialDetector detector = FixedDelayOracle{};
    std::int64_t horizon = 1;
    std::int64_t pre_window = 0;
    GaussianModel pre{0.0, 1.0};
    GaussianModel post{1.0, 1.0};
    /// Empty selects changepoint_grid(horizon, pre_window).
    std::vector<std::int64_t> grid;
    std::int64_t trials_per_point = 2000;
    std::uint64_t base_seed = 0;
    double delta_d = 0.01;
    bool allow_variance_override = false;
};

void validate_plan(const ExperimentPlan& plan);
std::vector<std::int64_t> effective_grid(const ExperimentPlan& plan);

struct ChangePointSummary {
    std::int64_t nu = 0;
    /// Absent when every trial raised a false alarm.
    std::optional<std::int64_t> percentile_delay;
    std::int64_t n_trials = 0;
    std::int64_t n_detected = 0;
    std::int64_t n_false_alarms = 0;
    std::int64_t n_censored = 0;
    /// False when the percentile lands on a censored trial.
    bool resolved = true;
    /// Trials with tau >= nu + bound (censored ones included); needs a bound.
    std::optional<std::int64_t> n_at_or_beyond_bound;

    friend bool operator==(const ChangePointSummary&, const ChangePointSummary&) = default;
};

struct LatencyReport {
    std::string detector;
    std::int64_t horizon = 0;
    std::int64_t pre_window = 0;
    double delta_f = 0.0;
    double delta_d = 0.0;
    double sigma2 = 0.0;
    double gap = 0.0;
    std::optional<std::int64_t> window;
    std::int64_t trials_per_point = 0;
    std::uint64_t base_seed = 0;

    std::vector<ChangePointSummary> per_nu;
    /// max over nu of the percentile delay
    std::optional<std::int64_t> empirical_latency;
    /// fraction of all trials that fired before the change
    double fa_probability = 0.0;
    /// theoretical latency guarantee for the plan's parameters, when one applies
    std::optional<std::int64_t> bound;

    friend bool operator==(const LatencyReport&, const LatencyReport&) = default;
};

/// Theoretical latency for the plan (known-pre or both-unknown guarantee), if
/// the detector has one and the pre-window admits it.
std::optional<std::int64_t> plan_bound(const ExperimentPlan& plan);

/// Runs trials_per_point trials at every grid change point on up to `threads`
/// workers (0 = hardware concurrency). The report does not depend on `threads`.
LatencyReport estimate_latency(const ExperimentPlan& plan, unsigned threads = 0);

struct FalseAlarmEstimate {
    double fa_rate = 0.0;
    /// 3 sqrt(p (1 - p) / trials)
    double ci_halfwidth = 0.0;
    std::int64_t n_trials = 0;
    std::int64_t n_alarms = 0;
};

FalseAlarmEstimate estimate_false_alarm(const TrialDetector& detector, std::int64_t horizon, std::int64_t trials,
                                        std::uint64_t base_seed, const GaussianModel& pre, unsigned threads = 0);

}  // namespace qcd
