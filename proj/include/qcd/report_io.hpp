#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcd/detectors.hpp"
#include "qcd/montecarlo.hpp"

namespace qcd {

/// Shortest decimal text that parses back to the same double.
std::string format_real(double value);

nlohmann::json to_json(const LatencyReport& report);
LatencyReport latency_report_from_json(const nlohmann::json& j);

/// nu,percentile_delay,n_trials,n_false_alarms,n_censored rows, then a
/// summary row whose nu column reads "summary".
void write_latency_csv(std::ostream& out, const LatencyReport& report);

nlohmann::json to_json(const FalseAlarmEstimate& estimate);
void write_false_alarm_csv(std::ostream& out, const FalseAlarmEstimate& estimate, const std::string& detector,
                           std::int64_t horizon);

/// n,statistic,threshold,alarm
void write_trace_csv(std::ostream& out, const std::vector<StepOutcome>& trace);

struct SweepRow {
    double axis_value = 0.0;
    std::optional<std::int64_t> empirical_latency;
    std::optional<std::int64_t> bound;
    std::string detector;
};

/// axis_value,empirical_latency,bound,detector
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Parses newline-delimited decimal observations. Blank lines are skipped;
/// anything else that is not a finite number raises ValidationError citing
/// the 1-based line number.
std::vector<double> read_observations(std::istream& in);

}  // namespace qcd
