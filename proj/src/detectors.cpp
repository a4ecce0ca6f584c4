#include "qcd/detectors.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace qcd {

namespace {

struct FamilyName {
    DetectorFamily family;
    std::string_view name;
};

constexpr std::array<FamilyName, 7> kFamilyNames{{
    {DetectorFamily::cusum_fixed, "cusum"},
    {DetectorFamily::sr_fixed, "sr"},
    {DetectorFamily::tvt_cusum, "tvt-cusum"},
    {DetectorFamily::glr_post, "glr-post"},
    {DetectorFamily::gsr_post, "gsr-post"},
    {DetectorFamily::glr_both, "glr-both"},
    {DetectorFamily::gsr_both, "gsr-both"},
}};

DetectorKind with_known_means(DetectorFamily family, double mu0, double mu1, double sigma2) {
    DetectorKind kind;
    kind.family = family;
    kind.mu0 = mu0;
    kind.mu1 = mu1;
    kind.sigma2 = sigma2;
    kind.window = Window::full();
    return kind;
}

}  // namespace

std::string_view to_string(DetectorFamily family) {
    for (const auto& entry : kFamilyNames) {
        if (entry.family == family) return entry.name;
    }
    return "unknown";
}

std::optional<DetectorFamily> parse_detector_family(std::string_view name) {
    for (const auto& entry : kFamilyNames) {
        if (entry.name == name) return entry.family;
    }
    // Accept the upper-case tags as well, e.g. GLR_BOTH.
    std::string normalized;
    for (char ch : name) {
        normalized.push_back(ch == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    if (normalized == "cusum-fixed") return DetectorFamily::cusum_fixed;
    if (normalized == "sr-fixed") return DetectorFamily::sr_fixed;
    for (const auto& entry : kFamilyNames) {
        if (entry.name == normalized) return entry.family;
    }
    return std::nullopt;
}

bool uses_known_post_mean(DetectorFamily family) noexcept {
    return family == DetectorFamily::cusum_fixed || family == DetectorFamily::sr_fixed ||
           family == DetectorFamily::tvt_cusum;
}

bool uses_known_pre_mean(DetectorFamily family) noexcept {
    return uses_known_post_mean(family) || family == DetectorFamily::glr_post ||
           family == DetectorFamily::gsr_post;
}

bool is_two_sided(DetectorFamily family) noexcept {
    return family == DetectorFamily::glr_both || family == DetectorFamily::gsr_both;
}

bool is_shiryaev_roberts_sum(DetectorFamily family) noexcept {
    return family == DetectorFamily::gsr_post || family == DetectorFamily::gsr_both;
}

DetectorKind DetectorKind::cusum_fixed(double threshold, double mu0, double mu1, double sigma2) {
    auto kind = with_known_means(DetectorFamily::cusum_fixed, mu0, mu1, sigma2);
    kind.fixed_threshold = threshold;
    return kind;
}

DetectorKind DetectorKind::sr_fixed(double log_threshold, double mu0, double mu1, double sigma2) {
    auto kind = with_known_means(DetectorFamily::sr_fixed, mu0, mu1, sigma2);
    kind.fixed_threshold = log_threshold;
    return kind;
}

DetectorKind DetectorKind::tvt_cusum(double r, double mu0, double mu1, double sigma2) {
    auto kind = with_known_means(DetectorFamily::tvt_cusum, mu0, mu1, sigma2);
    kind.r = r;
    return kind;
}

DetectorKind DetectorKind::glr_post(double mu0, double sigma2, Window window) {
    DetectorKind kind;
    kind.family = DetectorFamily::glr_post;
    kind.mu0 = mu0;
    kind.sigma2 = sigma2;
    kind.window = window;
    return kind;
}

DetectorKind DetectorKind::gsr_post(double mu0, double sigma2, Window window) {
    auto kind = glr_post(mu0, sigma2, window);
    kind.family = DetectorFamily::gsr_post;
    return kind;
}

DetectorKind DetectorKind::glr_both(double sigma2, Window window) {
    DetectorKind kind;
    kind.family = DetectorFamily::glr_both;
    kind.sigma2 = sigma2;
    kind.window = window;
    return kind;
}

DetectorKind DetectorKind::gsr_both(double sigma2, Window window) {
    auto kind = glr_both(sigma2, window);
    kind.family = DetectorFamily::gsr_both;
    return kind;
}

std::optional<ThresholdKind> threshold_kind_for(const DetectorKind& kind) {
    switch (kind.family) {
        case DetectorFamily::cusum_fixed:
        case DetectorFamily::sr_fixed: return std::nullopt;
        case DetectorFamily::tvt_cusum: return ThresholdKind::tvt_cusum(kind.r);
        case DetectorFamily::glr_post: return ThresholdKind::glr_post();
        case DetectorFamily::gsr_post: return ThresholdKind::gsr_post();
        case DetectorFamily::glr_both: return ThresholdKind::glr_both();
        case DetectorFamily::gsr_both: return ThresholdKind::gsr_both();
    }
    return std::nullopt;
}

void validate_detector_kind(const DetectorKind& kind) {
    const std::string name(to_string(kind.family));
    if (!(kind.sigma2 > 0.0) || !std::isfinite(kind.sigma2)) {
        throw ValidationError(name + ": sigma2 must be positive and finite");
    }
    if (uses_known_pre_mean(kind.family) && !kind.mu0) {
        throw ValidationError(name + ": missing required parameter mu0");
    }
    if (uses_known_post_mean(kind.family) && !kind.mu1) {
        throw ValidationError(name + ": missing required parameter mu1");
    }
    if (kind.mu0 && !std::isfinite(*kind.mu0)) throw ValidationError(name + ": mu0 must be finite");
    if (kind.mu1 && !std::isfinite(*kind.mu1)) throw ValidationError(name + ": mu1 must be finite");
    if (kind.family == DetectorFamily::tvt_cusum && !(kind.r > 1.0)) {
        throw ValidationError(name + ": r must exceed 1");
    }
    if ((kind.family == DetectorFamily::cusum_fixed || kind.family == DetectorFamily::sr_fixed) &&
        std::isnan(kind.fixed_threshold)) {
        throw ValidationError(name + ": threshold is NaN");
    }
    if (is_shiryaev_roberts_sum(kind.family)) {
        if (!kind.window.is_full() && !kind.experimental_windowed_gsr) {
            throw ValidationError(name + ": windowed GSR requires the experimental flag");
        }
        if (kind.full_gsr_cap < 1) throw ValidationError(name + ": full GSR cap must be >= 1");
    }
}

Detector::Detector(DetectorKind kind, double delta_f) : kind_(std::move(kind)), delta_f_(delta_f) {
    validate_detector_kind(kind_);
    if (!(delta_f > 0.0 && delta_f < 1.0)) {
        throw ValidationError("delta_f must lie in (0, 1), got " + std::to_string(delta_f));
    }
    threshold_kind_ = threshold_kind_for(kind_);
    reset();
}

void Detector::reset() {
    n_ = 0;
    scalar_ = kind_.family == DetectorFamily::sr_fixed ? -std::numeric_limits<double>::infinity() : 0.0;
    prefix_.clear();
    fired_at_.reset();
    last_ = StepOutcome{};
}

double Detector::threshold_at(std::int64_t n) const {
    if (threshold_kind_) return threshold_value(*threshold_kind_, n, delta_f_);
    return kind_.fixed_threshold;
}

double Detector::next_statistic(double x, double threshold) {
    const auto family = kind_.family;
    switch (family) {
        case DetectorFamily::cusum_fixed:
        case DetectorFamily::tvt_cusum:
            scalar_ = cusum_update(scalar_, llr_gauss(x, *kind_.mu0, *kind_.mu1, kind_.sigma2));
            return scalar_;
        case DetectorFamily::sr_fixed:
            scalar_ = log_sr_update(scalar_, llr_gauss(x, *kind_.mu0, *kind_.mu1, kind_.sigma2));
            return scalar_;
        default: break;
    }

    if (is_shiryaev_roberts_sum(family) && kind_.window.is_full() && n_ > kind_.full_gsr_cap) {
        throw NumericError(std::string(to_string(family)) + ": unwindowed GSR is capped at " +
                           std::to_string(kind_.full_gsr_cap) + " steps");
    }
    prefix_.append(x);
    if (decision_only_ && is_shiryaev_roberts_sum(family) && !(family == DetectorFamily::gsr_both && n_ < 2)) {
        // log W_n <= G_n + log|K|.
        const bool two_sided = family == DetectorFamily::gsr_both;
        const double sup = two_sided ? glr_both_stat(prefix_, kind_.sigma2, kind_.window)
                                     : glr_post_stat(prefix_, *kind_.mu0, kind_.sigma2, kind_.window);
        const auto candidates = two_sided
                                    ? both_candidate_count(n_, kind_.window, kind_.include_degenerate_split)
                                    : post_candidate_count(n_, kind_.window);
        const double ceiling = sup + std::log(static_cast<double>(candidates));
        if (ceiling < threshold) return ceiling;
    }
    switch (family) {
        case DetectorFamily::glr_post: return glr_post_stat(prefix_, *kind_.mu0, kind_.sigma2, kind_.window);
        case DetectorFamily::gsr_post: return gsr_post_logstat(prefix_, *kind_.mu0, kind_.sigma2, kind_.window);
        case DetectorFamily::glr_both:
            return n_ < 2 ? 0.0 : glr_both_stat(prefix_, kind_.sigma2, kind_.window);
        case DetectorFamily::gsr_both:
            return n_ < 2 ? 0.0
                          : gsr_both_logstat(prefix_, kind_.sigma2, kind_.window, kind_.include_degenerate_split);
        default: break;
    }
    throw ValidationError("unsupported detector family");
}

StepOutcome Detector::step(double x) {
    if (fired_at_) return last_;
    if (!std::isfinite(x)) throw NumericError("non-finite observation at step " + std::to_string(n_ + 1));

    ++n_;
    const double threshold = threshold_at(n_);
    const double statistic = next_statistic(x, threshold);
    // Two-sided statistics have no admissible split at n = 1.
    const bool degenerate = is_two_sided(kind_.family) && n_ < 2;
    const bool alarm = !degenerate && statistic >= threshold;
    if (alarm) fired_at_ = n_;
    last_ = StepOutcome{n_, statistic, threshold, alarm};
    return last_;
}

Detector make_detector(DetectorKind kind, double delta_f) { return Detector(std::move(kind), delta_f); }

StoppingReport run_offline(const DetectorKind& kind, double delta_f, std::span<const double> series,
                           bool keep_trace) {
    Detector detector(kind, delta_f);
    detector.reserve(static_cast<std::int64_t>(series.size()));
    StoppingReport report;
    for (double x : series) {
        const auto outcome = detector.step(x);
        if (keep_trace) report.trace.push_back(outcome);
        if (outcome.alarm) break;
    }
    report.fired_at = detector.fired_at();
    return report;
}

}  // namespace qcd
