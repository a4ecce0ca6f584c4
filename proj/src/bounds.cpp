#include "qcd/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <tuple>

#include "qcd/errors.hpp"
#include "qcd/model.hpp"

namespace qcd {

namespace {

bool is_post_kind(ThresholdFamily kind) {
    return kind == ThresholdFamily::glr_post || kind == ThresholdFamily::gsr_post;
}

bool is_both_kind(ThresholdFamily kind) {
    return kind == ThresholdFamily::glr_both || kind == ThresholdFamily::gsr_both;
}

void require_post(const BoundInputs& b) {
    if (!is_post_kind(b.kind)) {
        throw ValidationError("bound needs glr-post or gsr-post, got " + std::string(to_string(b.kind)));
    }
}

void require_both(const BoundInputs& b) {
    if (!is_both_kind(b.kind)) {
        throw ValidationError("bound needs glr-both or gsr-both, got " + std::string(to_string(b.kind)));
    }
}

std::int64_t ceil_to_int(double v) {
    if (!std::isfinite(v)) throw NumericError("bound is not finite");
    return static_cast<std::int64_t>(std::ceil(v));
}

struct LineFit {
    double intercept;
    double slope;
};

LineFit ordinary_least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    return {my - slope * mx, slope};
}

}  // namespace

void validate_bound_inputs(const BoundInputs& b) {
    if (b.horizon < 1) throw ValidationError("horizon must be >= 1");
    validate_probability(b.delta_f, "delta_f");
    validate_probability(b.delta_d, "delta_d");
    if (!(b.sigma2 > 0.0) || !std::isfinite(b.sigma2)) throw ValidationError("sigma2 must be positive");
    if (!(b.gap > 0.0) || !std::isfinite(b.gap)) throw ValidationError("change gap must be positive");
    if (b.pre_window < 0) throw ValidationError("pre-window must be >= 0");
    if (b.kind == ThresholdFamily::tvt_cusum) throw ValidationError("no latency bound for tvt-cusum here");
}

double horizon_threshold(const BoundInputs& b) {
    return threshold_value(ThresholdKind::of(b.kind), b.horizon, b.delta_f);
}

std::int64_t latency_bound_known_pre(const BoundInputs& b) {
    validate_bound_inputs(b);
    require_post(b);
    const double root = std::sqrt(horizon_threshold(b)) + std::sqrt(std::log(2.0 / b.delta_d));
    return ceil_to_int(2.0 * b.sigma2 / (b.gap * b.gap) * root * root);
}

std::int64_t min_prewindow(const BoundInputs& b) {
    validate_bound_inputs(b);
    require_both(b);
    return ceil_to_int(8.0 * b.sigma2 * horizon_threshold(b) / (b.gap * b.gap));
}

std::int64_t latency_bound_both_unknown(const BoundInputs& b) {
    validate_bound_inputs(b);
    require_both(b);
    const double beta = horizon_threshold(b);
    const double m = static_cast<double>(b.pre_window);
    const double requirement = 8.0 * b.sigma2 * beta;
    const double denominator = b.gap * b.gap * m - requirement;
    if (!(denominator > 0.0)) {
        throw ValidationError("pre-window too small: need gap^2 * m > 8 * sigma2 * beta(T, delta_f), i.e. m >= " +
                              std::to_string(min_prewindow(b) + 1) + ", got m = " + std::to_string(b.pre_window));
    }
    const double first = requirement * m / denominator;
    const double second = std::pow(b.delta_f, 2.0 / 3.0) / (std::pow(2.0, 16.0 / 15.0) * std::pow(b.delta_d, 4.0 / 15.0)) - m;
    return ceil_to_int(std::max(first, second));
}

std::int64_t prewindow_cor1(const BoundInputs& b) {
    validate_bound_inputs(b);
    require_both(b);
    return ceil_to_int(16.0 * b.sigma2 / (b.gap * b.gap) * horizon_threshold(b) + std::log(1.0 / b.delta_d));
}

GrowthReport property1_check(const std::vector<LatencyPoint>& points) {
    std::set<std::tuple<std::int64_t, double, double>> distinct;
    for (const auto& p : points) {
        if (p.horizon < 1) throw ValidationError("property1_check: horizon must be >= 1");
        validate_probability(p.delta_f, "delta_f");
        validate_probability(p.delta_d, "delta_d");
        distinct.emplace(p.horizon, p.delta_f, p.delta_d);
    }
    if (distinct.size() < 3) throw ValidationError("property1_check needs at least 3 distinct parameter points");

    std::vector<double> x, y;
    for (const auto& p : points) {
        x.push_back(std::log(static_cast<double>(p.horizon)) + std::log(1.0 / p.delta_f) + std::log(1.0 / p.delta_d));
        y.push_back(p.latency);
    }
    const auto fit = ordinary_least_squares(x, y);

    GrowthReport report;
    report.intercept = fit.intercept;
    report.slope = fit.slope;
    std::vector<double> log_t, ratio;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double fitted = fit.intercept + fit.slope * x[i];
        if (!(fitted > 0.0)) continue;
        log_t.push_back(std::log(static_cast<double>(points[i].horizon)));
        ratio.push_back(y[i] / fitted);
    }
    if (ratio.empty()) return report;
    report.max_ratio = *std::max_element(ratio.begin(), ratio.end());
    const auto [lo, hi] = std::minmax_element(log_t.begin(), log_t.end());
    const double span = *hi - *lo;
    if (span > 0.0) {
        report.ratio_trend = ordinary_least_squares(log_t, ratio).slope;
        report.super_logarithmic = report.ratio_trend * span > kSuperLogTolerance;
    }
    return report;
}

}  // namespace qcd
