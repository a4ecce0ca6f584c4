#pragma once

#include <cstdint>
#include <string_view>

#include "qcd/errors.hpp"

namespace qcd {

enum class ThresholdFamily { tvt_cusum, glr_post, gsr_post, glr_both, gsr_both };

std::string_view to_string(ThresholdFamily family);

/// Selects one of the five time-varying thresholds. The TVT-CuSum form
/// carries its exponent r > 1 and caches zeta(r).
class ThresholdKind {
public:
    static ThresholdKind tvt_cusum(double r);
    static ThresholdKind glr_post() { return ThresholdKind(ThresholdFamily::glr_post); }
    static ThresholdKind gsr_post() { return ThresholdKind(ThresholdFamily::gsr_post); }
    static ThresholdKind glr_both() { return ThresholdKind(ThresholdFamily::glr_both); }
    static ThresholdKind gsr_both() { return ThresholdKind(ThresholdFamily::gsr_both); }
    /// `r` is only read for tvt_cusum.
    static ThresholdKind of(ThresholdFamily family, double r = 2.0);

    ThresholdFamily family() const noexcept { return family_; }
    double r() const noexcept { return r_; }
    double log_zeta_r() const noexcept { return log_zeta_r_; }

private:
    explicit ThresholdKind(ThresholdFamily family) : family_(family) {}

    ThresholdFamily family_;
    double r_ = 0.0;
    double log_zeta_r_ = 0.0;
};

/// Riemann zeta for r > 1.
double zeta(double r);

/// log(zeta(r) n^r / delta_f)
double tvt_cusum_threshold(std::int64_t n, double delta_f, double r);
/// 3 log(1 + log n) + 5/4 log(3 n^{3/2} / delta_f) + 11/2
double glr_post_threshold(std::int64_t n, double delta_f);
/// glr_post_threshold + log n
double gsr_post_threshold(std::int64_t n, double delta_f);
/// 6 log(1 + log n) + 5/2 log(4 n^{3/2} / delta_f) + 11
double glr_both_threshold(std::int64_t n, double delta_f);
/// glr_both_threshold + log n
double gsr_both_threshold(std::int64_t n, double delta_f);

double threshold_value(const ThresholdKind& kind, std::int64_t n, double delta_f);

}  // namespace qcd
