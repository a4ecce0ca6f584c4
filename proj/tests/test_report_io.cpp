#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qcd/report_io.hpp"

using namespace qcd;

namespace {

LatencyReport sample_report() {
    LatencyReport r;
    r.detector = "glr-both";
    r.horizon = 5000;
    r.pre_window = 1082;
    r.delta_f = 0.05;
    r.delta_d = 0.05;
    r.sigma2 = 1.0;
    r.gap = 1.0;
    r.window = 700;
    r.trials_per_point = 3;
    r.base_seed = 0xFFFFFFFFFFFFFFF1ULL;
    r.per_nu.push_back({1083, 41, 3, 3, 0, 0, true, 0});
    r.per_nu.push_back({1583, std::nullopt, 3, 0, 3, 0, true, std::nullopt});
    r.empirical_latency = 41;
    r.fa_probability = 0.1 + 0.2;
    r.bound = 1076;
    return r;
}

}  // namespace

TEST_CASE("real formatting round-trips") {
    CHECK(format_real(0.1) == "0.1");
    CHECK(format_real(2.0) == "2");
    CHECK(format_real(-1.5e-300) == "-1.5e-300");
    for (double v : {0.1 + 0.2, 1.0 / 3.0, 12.629728093320251, 1e22}) CHECK(std::stod(format_real(v)) == v);
}

TEST_CASE("latency report json round-trip") {
    const auto r = sample_report();
    const auto text = to_json(r).dump();
    CHECK(latency_report_from_json(nlohmann::json::parse(text)) == r);

    auto no_window = r;
    no_window.window.reset();
    no_window.bound.reset();
    no_window.empirical_latency.reset();
    CHECK(latency_report_from_json(to_json(no_window)) == no_window);

    CHECK_THROWS_AS(latency_report_from_json(nlohmann::json{{"detector", "x"}}), ValidationError);
}

TEST_CASE("latency csv layout") {
    std::ostringstream out;
    write_latency_csv(out, sample_report());
    CHECK(out.str() ==
          "nu,percentile_delay,n_trials,n_false_alarms,n_censored\n"
          "1083,41,3,0,0\n"
          "1583,none,3,3,0\n"
          "summary,41,6,3,0\n");
}

TEST_CASE("trace, sweep and false-alarm csv") {
    std::ostringstream trace;
    write_trace_csv(trace, {{1, 0.0, 12.5, false}, {2, 2.0, 13.25, true}});
    CHECK(trace.str() == "n,statistic,threshold,alarm\n1,0,12.5,0\n2,2,13.25,1\n");

    std::ostringstream sweep;
    write_sweep_csv(sweep, {{5000, 120, 1076, "glr-both"}, {0.01, std::nullopt, std::nullopt, "tvt-cusum"}});
    CHECK(sweep.str() == "axis_value,empirical_latency,bound,detector\n5000,120,1076,glr-both\n0.01,none,none,tvt-cusum\n");

    std::ostringstream fa;
    write_false_alarm_csv(fa, FalseAlarmEstimate{0.25, 0.5, 4, 1}, "glr-post", 10);
    CHECK(fa.str() == "detector,horizon,n_trials,n_alarms,fa_rate,ci_halfwidth\nglr-post,10,4,1,0.25,0.5\n");
}

TEST_CASE("observation parsing") {
    std::istringstream ok("1.5\n\n  -2e-3 \r\n+4\n0\n");
    CHECK(read_observations(ok) == std::vector<double>{1.5, -0.002, 4.0, 0.0});

    std::istringstream bad("1\n2\nabc\n");
    try {
        read_observations(bad);
        FAIL("expected an error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::istringstream inf("1\ninf\n");
    CHECK_THROWS_AS(read_observations(inf), ValidationError);
    std::istringstream trailing("1.0x\n");
    CHECK_THROWS_AS(read_observations(trailing), ValidationError);
    std::istringstream empty("");
    CHECK(read_observations(empty).empty());
}
