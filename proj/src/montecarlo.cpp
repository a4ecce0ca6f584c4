#include "qcd/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "qcd/bounds.hpp"
#include "qcd/random.hpp"

namespace qcd {

namespace {

// Calls fn(i) for i in [0, count) on up to `threads` workers. The first
// exception thrown by any call is rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::int64_t count, unsigned threads, Fn fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::int64_t>(threads, std::max<std::int64_t>(count, 1)));
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

std::optional<std::int64_t> stopping_time(const DetectorConfig& config, const ChangeScenario& scenario,
                                          std::uint64_t seed) {
    Detector detector(config.kind, config.delta_f);
    detector.reserve(scenario.horizon);
    detector.set_decision_only(true);
    SampleStream stream(scenario, seed);
    for (std::int64_t n = 1; n <= scenario.horizon; ++n) {
        if (detector.step(stream.next()).alarm) return n;
    }
    return std::nullopt;
}

std::optional<std::int64_t> stopping_time(const FixedDelayOracle& oracle, const ChangeScenario& scenario,
                                          std::uint64_t) {
    if (!scenario.change_point) return std::nullopt;
    const std::int64_t at = *scenario.change_point + oracle.delay;
    if (at < 1 || at > scenario.horizon) return std::nullopt;
    return at;
}

const DetectorConfig* as_config(const TrialDetector& detector) { return std::get_if<DetectorConfig>(&detector); }

ChangeScenario scenario_for(const ExperimentPlan& plan, std::optional<std::int64_t> nu) {
    return ChangeScenario{plan.horizon, nu, plan.pre_window, plan.pre, plan.post};
}

void validate_detector(const TrialDetector& detector, std::int64_t horizon) {
    if (const auto* config = as_config(detector)) {
        Detector probe(config->kind, config->delta_f);
        const auto& kind = config->kind;
        if (is_shiryaev_roberts_sum(kind.family) && kind.window.is_full() && horizon > kind.full_gsr_cap) {
            throw ValidationError("unwindowed " + std::string(to_string(kind.family)) + " is capped at " +
                                  std::to_string(kind.full_gsr_cap) + " steps; horizon is " +
                                  std::to_string(horizon));
        }
    }
}

}  // namespace

std::string detector_label(const TrialDetector& detector) {
    if (const auto* config = as_config(detector)) return std::string(to_string(config->kind.family));
    return "oracle-delay-" + std::to_string(std::get<FixedDelayOracle>(detector).delay);
}

TrialRecord classify_trial(std::uint64_t seed, std::optional<std::int64_t> change_point,
                           std::optional<std::int64_t> fired_at) {
    TrialRecord record{seed, change_point, fired_at, TrialOutcome::censored, 0};
    if (!fired_at) return record;
    if (!change_point || *fired_at < *change_point) {
        record.outcome = TrialOutcome::false_alarm;
        return record;
    }
    record.outcome = TrialOutcome::detected;
    record.delay = *fired_at - *change_point;
    return record;
}

TrialRecord run_trial(const TrialDetector& detector, const ChangeScenario& scenario, std::uint64_t seed) {
    validate_scenario(scenario);
    const auto fired_at =
        std::visit([&](const auto& d) { return stopping_time(d, scenario, seed); }, detector);
    return classify_trial(seed, scenario.change_point, fired_at);
}

std::vector<std::int64_t> changepoint_grid(std::int64_t horizon, std::int64_t pre_window) {
    if (pre_window < 0) throw ValidationError("pre-window must be >= 0");
    if (pre_window >= horizon) {
        throw ValidationError("pre-window " + std::to_string(pre_window) + " must be smaller than horizon " +
                              std::to_string(horizon));
    }
    std::vector<std::int64_t> grid;
    for (std::int64_t n = 0;; ++n) {
        const std::int64_t nu = pre_window + 1 + n * horizon / 10;
        if (nu > horizon) break;
        if (grid.empty() || grid.back() != nu) grid.push_back(nu);
    }
    return grid;
}

std::int64_t nearest_rank_percentile(const std::vector<std::int64_t>& sorted, double q) {
    if (sorted.empty()) throw ValidationError("percentile of an empty sample");
    if (!(q > 0.0 && q < 1.0)) throw ValidationError("percentile level must lie in (0, 1)");
    const double n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::int64_t>(std::ceil(q * n));
    rank = std::clamp<std::int64_t>(rank, 1, static_cast<std::int64_t>(sorted.size()));
    return sorted[static_cast<std::size_t>(rank - 1)];
}

std::vector<std::int64_t> effective_grid(const ExperimentPlan& plan) {
    return plan.grid.empty() ? changepoint_grid(plan.horizon, plan.pre_window) : plan.grid;
}

void validate_plan(const ExperimentPlan& plan) {
    if (plan.trials_per_point < 1) throw ValidationError("trials per point must be >= 1");
    validate_probability(plan.delta_d, "delta_d");
    validate_detector(plan.detector, plan.horizon);
    const auto grid = effective_grid(plan);
    if (grid.empty()) throw ValidationError("change-point grid is empty");
    for (auto nu : grid) {
        const auto scenario = scenario_for(plan, nu);
        if (const auto* config = as_config(plan.detector)) {
            validate_scenario(scenario, config->kind.sigma2, plan.allow_variance_override);
        } else {
            validate_scenario(scenario);
        }
    }
}

std::optional<std::int64_t> plan_bound(const ExperimentPlan& plan) {
    const auto* config = as_config(plan.detector);
    if (!config) return std::nullopt;
    const auto family = config->kind.family;
    BoundInputs inputs{plan.horizon,       config->delta_f, plan.delta_d,
                       config->kind.sigma2, std::abs(plan.pre.mean - plan.post.mean),
                       plan.pre_window,     ThresholdFamily::glr_post};
    switch (family) {
        case DetectorFamily::glr_post:
        case DetectorFamily::gsr_post:
            inputs.kind = family == DetectorFamily::glr_post ? ThresholdFamily::glr_post : ThresholdFamily::gsr_post;
            return latency_bound_known_pre(inputs);
        case DetectorFamily::glr_both:
        case DetectorFamily::gsr_both:
            inputs.kind = family == DetectorFamily::glr_both ? ThresholdFamily::glr_both : ThresholdFamily::gsr_both;
            try {
                return latency_bound_both_unknown(inputs);
            } catch (const ValidationError&) {
                return std::nullopt;
            }
        default: return std::nullopt;
    }
}

LatencyReport estimate_latency(const ExperimentPlan& plan, unsigned threads) {
    validate_plan(plan);
    const auto grid = effective_grid(plan);
    const std::int64_t per_point = plan.trials_per_point;
    const auto total = static_cast<std::int64_t>(grid.size()) * per_point;

    std::vector<TrialRecord> records(static_cast<std::size_t>(total));
    parallel_for(total, threads, [&](std::int64_t index) {
        const auto point = static_cast<std::size_t>(index / per_point);
        const auto trial = static_cast<std::uint64_t>(index % per_point);
        const auto seed = trial_seed(plan.base_seed, point, trial);
        const auto scenario = scenario_for(plan, grid[point]);
        const auto fired_at = std::visit([&](const auto& d) { return stopping_time(d, scenario, seed); }, plan.detector);
        records[static_cast<std::size_t>(index)] = classify_trial(seed, grid[point], fired_at);
    });

    LatencyReport report;
    report.detector = detector_label(plan.detector);
    report.horizon = plan.horizon;
    report.pre_window = plan.pre_window;
    report.delta_d = plan.delta_d;
    report.gap = std::abs(plan.pre.mean - plan.post.mean);
    report.trials_per_point = per_point;
    report.base_seed = plan.base_seed;
    if (const auto* config = as_config(plan.detector)) {
        report.delta_f = config->delta_f;
        report.sigma2 = config->kind.sigma2;
        if (!config->kind.window.is_full()) report.window = config->kind.window.size();
    } else {
        report.sigma2 = plan.pre.variance;
    }
    report.bound = plan_bound(plan);

    const double q = 1.0 - plan.delta_d;
    std::int64_t false_alarms = 0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const std::int64_t nu = grid[p];
        const std::int64_t censored_delay = plan.horizon + 1 - nu;
        ChangePointSummary summary;
        summary.nu = nu;
        summary.n_trials = per_point;
        std::vector<std::int64_t> delays;
        delays.reserve(static_cast<std::size_t>(per_point));
        for (std::int64_t t = 0; t < per_point; ++t) {
            const auto& record = records[p * static_cast<std::size_t>(per_point) + static_cast<std::size_t>(t)];
            switch (record.outcome) {
                case TrialOutcome::detected:
                    ++summary.n_detected;
                    delays.push_back(record.delay);
                    break;
                case TrialOutcome::false_alarm: ++summary.n_false_alarms; break;
                case TrialOutcome::censored:
                    ++summary.n_censored;
                    delays.push_back(censored_delay);
                    break;
            }
        }
        false_alarms += summary.n_false_alarms;
        std::sort(delays.begin(), delays.end());
        if (!delays.empty()) {
            summary.percentile_delay = nearest_rank_percentile(delays, q);
            summary.resolved = *summary.percentile_delay < censored_delay;
            report.empirical_latency = std::max(report.empirical_latency.value_or(0), *summary.percentile_delay);
        }
        if (report.bound) {
            const auto late = std::count_if(delays.begin(), delays.end(),
                                            [&](std::int64_t d) { return d >= *report.bound; });
            summary.n_at_or_beyond_bound = static_cast<std::int64_t>(late);
        }
        report.per_nu.push_back(summary);
    }
    report.fa_probability = static_cast<double>(false_alarms) / static_cast<double>(total);
    return report;
}

FalseAlarmEstimate estimate_false_alarm(const TrialDetector& detector, std::int64_t horizon, std::int64_t trials,
                                        std::uint64_t base_seed, const GaussianModel& pre, unsigned threads) {
    if (trials < 1) throw ValidationError("false-alarm estimate needs at least one trial");
    const ChangeScenario scenario{horizon, std::nullopt, 0, pre, pre};
    validate_scenario(scenario);
    validate_detector(detector, horizon);

    std::vector<char> fired(static_cast<std::size_t>(trials), 0);
    parallel_for(trials, threads, [&](std::int64_t i) {
        const auto seed = trial_seed(base_seed, kNoChangeLane, static_cast<std::uint64_t>(i));
        const auto at = std::visit([&](const auto& d) { return stopping_time(d, scenario, seed); }, detector);
        fired[static_cast<std::size_t>(i)] = at.has_value() ? 1 : 0;
    });

    FalseAlarmEstimate estimate;
    estimate.n_trials = trials;
    estimate.n_alarms = std::count(fired.begin(), fired.end(), 1);
    estimate.fa_rate = static_cast<double>(estimate.n_alarms) / static_cast<double>(trials);
    estimate.ci_halfwidth = 3.0 * std::sqrt(estimate.fa_rate * (1.0 - estimate.fa_rate) / static_cast<double>(trials));
    return estimate;
}

}  // namespace qcd
