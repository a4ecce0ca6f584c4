#include <doctest.h>

#include <cmath>
#include <string>

#include "qcd/bounds.hpp"
#include "qcd/errors.hpp"

using namespace qcd;

namespace {

BoundInputs inputs(ThresholdFamily kind, std::int64_t T = 10000, double delta = 0.01, std::int64_t m = 0) {
    return BoundInputs{T, delta, delta, 1.0, 1.0, m, kind};
}

// Closed forms evaluated in long double, independently of the library.
long double beta_glr(long double n, long double d) {
    return 3 * std::log(1 + std::log(n)) + 1.25L * std::log(3 * std::pow(n, 1.5L) / d) + 5.5L;
}
long double beta_glr_both(long double n, long double d) {
    return 6 * std::log(1 + std::log(n)) + 2.5L * std::log(4 * std::pow(n, 1.5L) / d) + 11;
}

}  // namespace

TEST_CASE("known-pre latency bound") {
    CHECK(latency_bound_known_pre(inputs(ThresholdFamily::glr_post)) == 141);
    CHECK(latency_bound_known_pre(inputs(ThresholdFamily::gsr_post)) == 166);

    for (std::int64_t T : {100, 5000, 123456}) {
        for (double d : {0.2, 0.01, 1e-4}) {
            const long double b = beta_glr(T, d);
            const long double raw = 2 * std::pow(std::sqrt(b) + std::sqrt(std::log(2.0L / d)), 2);
            CHECK(latency_bound_known_pre(inputs(ThresholdFamily::glr_post, T, d)) ==
                  static_cast<std::int64_t>(std::ceil(raw)));
        }
    }
    auto scaled = inputs(ThresholdFamily::glr_post);
    scaled.gap = 2.0;
    CHECK(latency_bound_known_pre(scaled) == 36);  // ceil(140.24 / 4)
    CHECK_THROWS_AS(latency_bound_known_pre(inputs(ThresholdFamily::glr_both)), ValidationError);
}

TEST_CASE("pre-window bounds") {
    CHECK(min_prewindow(inputs(ThresholdFamily::glr_both)) == 596);
    CHECK(prewindow_cor1(inputs(ThresholdFamily::glr_both)) == 1196);
    CHECK(prewindow_cor1(inputs(ThresholdFamily::glr_both, 5000, 0.05)) == 1082);
    CHECK(min_prewindow(inputs(ThresholdFamily::glr_both, 5000, 0.05)) == 540);
    for (std::int64_t T : {50, 5000, 1000000}) {
        const long double b = beta_glr_both(T, 0.02L);
        CHECK(min_prewindow(inputs(ThresholdFamily::glr_both, T, 0.02)) == static_cast<std::int64_t>(std::ceil(8 * b)));
        CHECK(prewindow_cor1(inputs(ThresholdFamily::glr_both, T, 0.02)) ==
              static_cast<std::int64_t>(std::ceil(16 * b + std::log(1 / 0.02L))));
    }
    CHECK(min_prewindow(inputs(ThresholdFamily::gsr_both)) > 596);
    CHECK_THROWS_AS(min_prewindow(inputs(ThresholdFamily::glr_post)), ValidationError);
}

TEST_CASE("both-unknown latency bound") {
    CHECK(latency_bound_both_unknown(inputs(ThresholdFamily::glr_both, 10000, 0.01, 1196)) == 1187);
    CHECK(latency_bound_both_unknown(inputs(ThresholdFamily::glr_both, 10000, 0.01, 1192)) == 1191);
    CHECK(latency_bound_both_unknown(inputs(ThresholdFamily::glr_both, 5000, 0.05, 1082)) == 1076);

    // A longer pre-window gives a shorter bound.
    std::int64_t prev = latency_bound_both_unknown(inputs(ThresholdFamily::glr_both, 10000, 0.01, 700));
    for (std::int64_t m : {1000, 2000, 5000, 9000}) {
        const auto d = latency_bound_both_unknown(inputs(ThresholdFamily::glr_both, 10000, 0.01, m));
        CHECK(d <= prev);
        prev = d;
    }

    try {
        latency_bound_both_unknown(inputs(ThresholdFamily::glr_both, 10000, 0.01, 100));
        FAIL("expected an error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("pre-window too small") != std::string::npos);
    }
    CHECK_THROWS_AS(latency_bound_both_unknown(inputs(ThresholdFamily::glr_both, 10000, 0.01, 595)),
                    ValidationError);
    CHECK(latency_bound_both_unknown(inputs(ThresholdFamily::glr_both, 10000, 0.01, 596)) > 10000);
}

TEST_CASE("bound inputs are validated") {
    auto b = inputs(ThresholdFamily::glr_post);
    b.delta_d = 1.0;
    CHECK_THROWS_AS(validate_bound_inputs(b), ValidationError);
    b = inputs(ThresholdFamily::glr_post);
    b.gap = 0.0;
    CHECK_THROWS_AS(latency_bound_known_pre(b), ValidationError);
    b = inputs(ThresholdFamily::glr_post);
    b.sigma2 = -1.0;
    CHECK_THROWS_AS(latency_bound_known_pre(b), ValidationError);
    CHECK_THROWS_AS(validate_bound_inputs(inputs(ThresholdFamily::tvt_cusum)), ValidationError);
    CHECK(horizon_threshold(inputs(ThresholdFamily::glr_both)) == doctest::Approx(74.45784357511489));
}

TEST_CASE("property 1 diagnostic") {
    std::vector<LatencyPoint> logarithmic;
    std::vector<LatencyPoint> polynomial;
    for (std::int64_t T : {1000, 5000, 10000, 20000, 80000}) {
        const double x = std::log(static_cast<double>(T)) + 2 * std::log(100.0);
        logarithmic.push_back({T, 0.01, 0.01, 3.0 * x + 20.0});
        polynomial.push_back({T, 0.01, 0.01, std::sqrt(static_cast<double>(T))});
    }
    const auto ok = property1_check(logarithmic);
    CHECK_FALSE(ok.super_logarithmic);
    CHECK(ok.slope == doctest::Approx(3.0));
    CHECK(ok.intercept == doctest::Approx(20.0));
    CHECK(property1_check(polynomial).super_logarithmic);

    // Risk-axis points share T; the fit still runs on the combined log term.
    std::vector<LatencyPoint> by_delta;
    for (double d : {0.1, 0.01, 0.001}) by_delta.push_back({5000, d, d, 5.0 * -std::log(d) + 40.0});
    CHECK_FALSE(property1_check(by_delta).super_logarithmic);

    CHECK_THROWS_AS(property1_check({logarithmic[0], logarithmic[1]}), ValidationError);
    CHECK_THROWS_AS(property1_check({logarithmic[0], logarithmic[0], logarithmic[0]}), ValidationError);
}
