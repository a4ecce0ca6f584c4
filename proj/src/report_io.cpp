#include "qcd/report_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string_view>

#include "qcd/errors.hpp"

namespace qcd {

namespace {

using nlohmann::json;

template <typename T>
json optional_to_json(const std::optional<T>& value) {
    return value ? json(*value) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from_json(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

std::string optional_text(const std::optional<std::int64_t>& value) {
    return value ? std::to_string(*value) : std::string("none");
}

std::string_view trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r");
    return text.substr(first, last - first + 1);
}

}  // namespace

std::string format_real(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

json to_json(const LatencyReport& r) {
    json per_nu = json::array();
    for (const auto& s : r.per_nu) {
        per_nu.push_back({
            {"nu", s.nu},
            {"percentile_delay", optional_to_json(s.percentile_delay)},
            {"n_trials", s.n_trials},
            {"n_detected", s.n_detected},
            {"n_false_alarms", s.n_false_alarms},
            {"n_censored", s.n_censored},
            {"resolved", s.resolved},
            {"n_at_or_beyond_bound", optional_to_json(s.n_at_or_beyond_bound)},
        });
    }
    return json{
        {"detector", r.detector},
        {"horizon", r.horizon},
        {"pre_window", r.pre_window},
        {"delta_f", r.delta_f},
        {"delta_d", r.delta_d},
        {"sigma2", r.sigma2},
        {"gap", r.gap},
        {"window", optional_to_json(r.window)},
        {"trials_per_point", r.trials_per_point},
        {"base_seed", r.base_seed},
        {"per_nu", per_nu},
        {"empirical_latency", optional_to_json(r.empirical_latency)},
        {"fa_probability", r.fa_probability},
        {"bound", optional_to_json(r.bound)},
    };
}

LatencyReport latency_report_from_json(const json& j) {
    LatencyReport r;
    try {
        r.detector = j.at("detector").get<std::string>();
        r.horizon = j.at("horizon").get<std::int64_t>();
        r.pre_window = j.at("pre_window").get<std::int64_t>();
        r.delta_f = j.at("delta_f").get<double>();
        r.delta_d = j.at("delta_d").get<double>();
        r.sigma2 = j.at("sigma2").get<double>();
        r.gap = j.at("gap").get<double>();
        r.window = optional_from_json<std::int64_t>(j, "window");
        r.trials_per_point = j.at("trials_per_point").get<std::int64_t>();
        r.base_seed = j.at("base_seed").get<std::uint64_t>();
        for (const auto& s : j.at("per_nu")) {
            ChangePointSummary summary;
            summary.nu = s.at("nu").get<std::int64_t>();
            summary.percentile_delay = optional_from_json<std::int64_t>(s, "percentile_delay");
            summary.n_trials = s.at("n_trials").get<std::int64_t>();
            summary.n_detected = s.at("n_detected").get<std::int64_t>();
            summary.n_false_alarms = s.at("n_false_alarms").get<std::int64_t>();
            summary.n_censored = s.at("n_censored").get<std::int64_t>();
            summary.resolved = s.at("resolved").get<bool>();
            summary.n_at_or_beyond_bound = optional_from_json<std::int64_t>(s, "n_at_or_beyond_bound");
            r.per_nu.push_back(summary);
        }
        r.empirical_latency = optional_from_json<std::int64_t>(j, "empirical_latency");
        r.fa_probability = j.at("fa_probability").get<double>();
        r.bound = optional_from_json<std::int64_t>(j, "bound");
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed latency report: ") + e.what());
    }
    return r;
}

void write_latency_csv(std::ostream& out, const LatencyReport& r) {
    out << "nu,percentile_delay,n_trials,n_false_alarms,n_censored\n";
    std::int64_t trials = 0, false_alarms = 0, censored = 0;
    for (const auto& s : r.per_nu) {
        out << s.nu << ',' << optional_text(s.percentile_delay) << ',' << s.n_trials << ',' << s.n_false_alarms
            << ',' << s.n_censored << '\n';
        trials += s.n_trials;
        false_alarms += s.n_false_alarms;
        censored += s.n_censored;
    }
    out << "summary," << optional_text(r.empirical_latency) << ',' << trials << ',' << false_alarms << ','
        << censored << '\n';
}

json to_json(const FalseAlarmEstimate& e) {
    return json{{"fa_rate", e.fa_rate},
                {"ci_halfwidth", e.ci_halfwidth},
                {"n_trials", e.n_trials},
                {"n_alarms", e.n_alarms}};
}

void write_false_alarm_csv(std::ostream& out, const FalseAlarmEstimate& e, const std::string& detector,
                           std::int64_t horizon) {
    out << "detector,horizon,n_trials,n_alarms,fa_rate,ci_halfwidth\n";
    out << detector << ',' << horizon << ',' << e.n_trials << ',' << e.n_alarms << ',' << format_real(e.fa_rate)
        << ',' << format_real(e.ci_halfwidth) << '\n';
}

void write_trace_csv(std::ostream& out, const std::vector<StepOutcome>& trace) {
    out << "n,statistic,threshold,alarm\n";
    for (const auto& o : trace) {
        out << o.n << ',' << format_real(o.statistic) << ',' << format_real(o.threshold) << ','
            << (o.alarm ? 1 : 0) << '\n';
    }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "axis_value,empirical_latency,bound,detector\n";
    for (const auto& row : rows) {
        out << format_real(row.axis_value) << ',' << optional_text(row.empirical_latency) << ','
            << optional_text(row.bound) << ',' << row.detector << '\n';
    }
}

std::vector<double> read_observations(std::istream& in) {
    std::vector<double> values;
    std::string line;
    std::int64_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto text = trim(line);
        if (text.empty()) continue;
        double value = 0.0;
        const char* begin = text.data();
        const char* end = text.data() + text.size();
        if (*begin == '+') ++begin;
        const auto result = std::from_chars(begin, end, value);
        if (result.ec != std::errc{} || result.ptr != end || !std::isfinite(value)) {
            throw ValidationError("line " + std::to_string(line_number) + ": not a finite number: '" +
                                  std::string(text) + "'");
        }
        values.push_back(value);
    }
    return values;
}

}  // namespace qcd
