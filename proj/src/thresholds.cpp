#include "qcd/thresholds.hpp"

#include <cmath>
#include <string>

namespace qcd {

namespace {

void check_domain(std::int64_t n, double delta_f) {
    if (n < 1) throw ValidationError("threshold step must be >= 1, got " + std::to_string(n));
    if (!(delta_f > 0.0 && delta_f < 1.0)) {
        throw ValidationError("delta_f must lie in (0, 1), got " + std::to_string(delta_f));
    }
}

double log_n(std::int64_t n) { return std::log(static_cast<double>(n)); }

}  // namespace

std::string_view to_string(ThresholdFamily family) {
    switch (family) {
        case ThresholdFamily::tvt_cusum: return "tvt-cusum";
        case ThresholdFamily::glr_post: return "glr-post";
        case ThresholdFamily::gsr_post: return "gsr-post";
        case ThresholdFamily::glr_both: return "glr-both";
        case ThresholdFamily::gsr_both: return "gsr-both";
    }
    return "unknown";
}

double zeta(double r) {
    if (!(r > 1.0)) throw ValidationError("zeta(r) diverges for r <= 1, got " + std::to_string(r));
    return std::riemann_zeta(r);
}

ThresholdKind ThresholdKind::tvt_cusum(double r) {
    ThresholdKind kind(ThresholdFamily::tvt_cusum);
    kind.r_ = r;
    kind.log_zeta_r_ = std::log(zeta(r));
    return kind;
}

ThresholdKind ThresholdKind::of(ThresholdFamily family, double r) {
    return family == ThresholdFamily::tvt_cusum ? tvt_cusum(r) : ThresholdKind(family);
}

double tvt_cusum_threshold(std::int64_t n, double delta_f, double r) {
    check_domain(n, delta_f);
    return std::log(zeta(r)) + r * log_n(n) - std::log(delta_f);
}

double glr_post_threshold(std::int64_t n, double delta_f) {
    check_domain(n, delta_f);
    const double ln = log_n(n);
    return 3.0 * std::log1p(ln) + 1.25 * (std::log(3.0) + 1.5 * ln - std::log(delta_f)) + 5.5;
}

double gsr_post_threshold(std::int64_t n, double delta_f) { return glr_post_threshold(n, delta_f) + log_n(n); }

double glr_both_threshold(std::int64_t n, double delta_f) {
    check_domain(n, delta_f);
    const double ln = log_n(n);
    return 6.0 * std::log1p(ln) + 2.5 * (std::log(4.0) + 1.5 * ln - std::log(delta_f)) + 11.0;
}

double gsr_both_threshold(std::int64_t n, double delta_f) { return glr_both_threshold(n, delta_f) + log_n(n); }

double threshold_value(const ThresholdKind& kind, std::int64_t n, double delta_f) {
    switch (kind.family()) {
        case ThresholdFamily::tvt_cusum:
            check_domain(n, delta_f);
            return kind.log_zeta_r() + kind.r() * log_n(n) - std::log(delta_f);
        case ThresholdFamily::glr_post: return glr_post_threshold(n, delta_f);
        case ThresholdFamily::gsr_post: return gsr_post_threshold(n, delta_f);
        case ThresholdFamily::glr_both: return glr_both_threshold(n, delta_f);
        case ThresholdFamily::gsr_both: return gsr_both_threshold(n, delta_f);
    }
    throw ValidationError("unknown threshold family");
}

}  // namespace qcd
