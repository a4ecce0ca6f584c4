#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qcd/bounds.hpp"
#include "qcd/detectors.hpp"
#include "qcd/montecarlo.hpp"
#include "qcd/random.hpp"

namespace py = pybind11;
using namespace qcd;

namespace {

PrefixState prefix_of(const std::vector<double>& xs) {
    PrefixState s;
    s.reserve(static_cast<std::int64_t>(xs.size()));
    for (double x : xs) s.append(x);
    return s;
}

Window window_of(std::optional<std::int64_t> w) { return w ? Window::recent(*w) : Window::full(); }

DetectorKind make_kind(const std::string& name, std::optional<double> mu0, std::optional<double> mu1,
                       double sigma2, std::optional<std::int64_t> window, std::optional<double> threshold,
                       double r, bool include_degenerate_split) {
    const auto family = parse_detector_family(name);
    if (!family) throw ValidationError("unknown detector '" + name + "'");
    DetectorKind kind;
    kind.family = *family;
    kind.mu0 = mu0;
    kind.mu1 = mu1;
    kind.sigma2 = sigma2;
    kind.window = window ? Window::recent(*window)
                 : (is_shiryaev_roberts_sum(*family) || uses_known_post_mean(*family)) ? Window::full()
                                                                                       : Window::recent(kDefaultWindow);
    kind.fixed_threshold = threshold.value_or(0.0);
    kind.r = r;
    kind.include_degenerate_split = include_degenerate_split;
    validate_detector_kind(kind);
    return kind;
}

ThresholdFamily bound_family(const std::string& name) {
    const auto family = parse_detector_family(name);
    if (family == DetectorFamily::glr_post) return ThresholdFamily::glr_post;
    if (family == DetectorFamily::gsr_post) return ThresholdFamily::gsr_post;
    if (family == DetectorFamily::glr_both) return ThresholdFamily::glr_both;
    if (family == DetectorFamily::gsr_both) return ThresholdFamily::gsr_both;
    throw ValidationError("bounds exist for glr-post, gsr-post, glr-both and gsr-both only");
}

}  // namespace

PYBIND11_MODULE(_qcd, m) {
    m.doc() = "Sequential change detection with GLR/GSR statistics";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    m.def("kl_gauss", &kl_gauss, py::arg("x"), py::arg("y"), py::arg("sigma2"));
    m.def(
        "glr_post_stat",
        [](const std::vector<double>& xs, double mu0, double sigma2, std::optional<std::int64_t> window) {
            return glr_post_stat(prefix_of(xs), mu0, sigma2, window_of(window));
        },
        py::arg("xs"), py::arg("mu0"), py::arg("sigma2"), py::arg("window") = py::none());
    m.def(
        "gsr_post_logstat",
        [](const std::vector<double>& xs, double mu0, double sigma2) {
            return gsr_post_logstat(prefix_of(xs), mu0, sigma2);
        },
        py::arg("xs"), py::arg("mu0"), py::arg("sigma2"));
    m.def(
        "glr_both_stat",
        [](const std::vector<double>& xs, double sigma2, std::optional<std::int64_t> window) {
            return glr_both_stat(prefix_of(xs), sigma2, window_of(window));
        },
        py::arg("xs"), py::arg("sigma2"), py::arg("window") = py::none());
    m.def(
        "gsr_both_logstat",
        [](const std::vector<double>& xs, double sigma2, bool include_degenerate_split) {
            return gsr_both_logstat(prefix_of(xs), sigma2, Window::full(), include_degenerate_split);
        },
        py::arg("xs"), py::arg("sigma2"), py::arg("include_degenerate_split") = false);

    m.def(
        "threshold",
        [](const std::string& family, std::int64_t n, double delta_f, double r) {
            const auto kind = family == "tvt-cusum" ? ThresholdKind::tvt_cusum(r) : ThresholdKind::of(bound_family(family));
            return threshold_value(kind, n, delta_f);
        },
        py::arg("family"), py::arg("n"), py::arg("delta_f"), py::arg("r") = 2.0);

    m.def(
        "bounds",
        [](const std::string& detector, std::int64_t horizon, double delta_f, double delta_d, double sigma2,
           double gap, std::optional<std::int64_t> pre_window) {
            BoundInputs in{horizon, delta_f, delta_d, sigma2, gap, 0, bound_family(detector)};
            py::dict out;
            out["beta"] = horizon_threshold(in);
            if (in.kind == ThresholdFamily::glr_post || in.kind == ThresholdFamily::gsr_post) {
                out["d"] = latency_bound_known_pre(in);
                return out;
            }
            out["m_min"] = min_prewindow(in);
            out["m_recommended"] = prewindow_cor1(in);
            in.pre_window = pre_window.value_or(prewindow_cor1(in));
            out["pre_window"] = in.pre_window;
            out["d"] = latency_bound_both_unknown(in);
            return out;
        },
        py::arg("detector"), py::arg("horizon"), py::arg("delta_f"), py::arg("delta_d"), py::arg("sigma2") = 1.0,
        py::arg("gap") = 1.0, py::arg("pre_window") = py::none());

    py::class_<StepOutcome>(m, "StepOutcome")
        .def_readonly("n", &StepOutcome::n)
        .def_readonly("statistic", &StepOutcome::statistic)
        .def_readonly("threshold", &StepOutcome::threshold)
        .def_readonly("alarm", &StepOutcome::alarm)
        .def("__repr__", [](const StepOutcome& o) {
            return "StepOutcome(n=" + std::to_string(o.n) + ", statistic=" + std::to_string(o.statistic) +
                   ", threshold=" + std::to_string(o.threshold) + ", alarm=" + (o.alarm ? "True" : "False") + ")";
        });

    py::class_<Detector>(m, "Detector")
        .def(py::init([](const std::string& kind, double delta_f, std::optional<double> mu0, std::optional<double> mu1,
                         double sigma2, std::optional<std::int64_t> window, std::optional<double> threshold, double r,
                         bool include_degenerate_split) {
                 return Detector(make_kind(kind, mu0, mu1, sigma2, window, threshold, r, include_degenerate_split),
                                 delta_f);
             }),
             py::arg("kind"), py::arg("delta_f") = 0.01, py::arg("mu0") = py::none(), py::arg("mu1") = py::none(),
             py::arg("sigma2") = 1.0, py::arg("window") = py::none(), py::arg("threshold") = py::none(),
             py::arg("r") = 2.0, py::arg("include_degenerate_split") = false)
        .def("step", &Detector::step, py::arg("x"))
        .def("reset", &Detector::reset)
        .def_property_readonly("fired_at", &Detector::fired_at)
        .def_property_readonly("steps", &Detector::steps);

    m.def(
        "generate_series",
        [](std::int64_t horizon, std::optional<std::int64_t> change_point, double mu0, double mu1, double sigma2,
           std::uint64_t seed) {
            return generate_series(
                ChangeScenario{horizon, change_point, 0, GaussianModel{mu0, sigma2}, GaussianModel{mu1, sigma2}}, seed);
        },
        py::arg("horizon"), py::arg("change_point") = py::none(), py::arg("mu0") = 0.0, py::arg("mu1") = 1.0,
        py::arg("sigma2") = 1.0, py::arg("seed") = 0);

    m.def(
        "estimate_false_alarm",
        [](const std::string& kind, std::int64_t horizon, std::int64_t trials, double delta_f, double mu0,
           double sigma2, std::optional<std::int64_t> window, std::uint64_t seed, unsigned threads) {
            const DetectorConfig config{make_kind(kind, mu0, std::nullopt, sigma2, window, std::nullopt, 2.0, false),
                                        delta_f};
            py::gil_scoped_release release;
            const auto e = estimate_false_alarm(config, horizon, trials, seed, GaussianModel{mu0, sigma2}, threads);
            return std::make_tuple(e.fa_rate, e.ci_halfwidth, e.n_alarms);
        },
        py::arg("kind"), py::arg("horizon"), py::arg("trials"), py::arg("delta_f") = 0.01, py::arg("mu0") = 0.0,
        py::arg("sigma2") = 1.0, py::arg("window") = py::none(), py::arg("seed") = 0, py::arg("threads") = 0,
        "Returns (fa_rate, ci_halfwidth, n_alarms).");

    m.def(
        "estimate_latency",
        [](const std::string& kind, std::int64_t horizon, std::int64_t pre_window, std::int64_t trials,
           double delta_f, double delta_d, double mu0, double mu1, double sigma2, std::optional<std::int64_t> window,
           std::uint64_t seed, unsigned threads) {
            ExperimentPlan plan;
            auto k = make_kind(kind, mu0, mu1, sigma2, window, std::nullopt, 2.0, false);
            if (!uses_known_pre_mean(k.family)) k.mu0.reset();
            if (!uses_known_post_mean(k.family)) k.mu1.reset();
            plan.detector = DetectorConfig{k, delta_f};
            plan.horizon = horizon;
            plan.pre_window = pre_window;
            plan.pre = GaussianModel{mu0, sigma2};
            plan.post = GaussianModel{mu1, sigma2};
            plan.trials_per_point = trials;
            plan.base_seed = seed;
            plan.delta_d = delta_d;
            LatencyReport r;
            {
                py::gil_scoped_release release;
                r = estimate_latency(plan, threads);
            }
            py::dict out;
            out["empirical_latency"] = r.empirical_latency;
            out["bound"] = r.bound;
            out["fa_probability"] = r.fa_probability;
            py::list per_nu;
            for (const auto& s : r.per_nu) {
                py::dict row;
                row["nu"] = s.nu;
                row["percentile_delay"] = s.percentile_delay;
                row["n_false_alarms"] = s.n_false_alarms;
                row["n_censored"] = s.n_censored;
                row["resolved"] = s.resolved;
                per_nu.append(row);
            }
            out["per_nu"] = per_nu;
            return out;
        },
        py::arg("kind"), py::arg("horizon"), py::arg("pre_window") = 0, py::arg("trials") = 2000,
        py::arg("delta_f") = 0.01, py::arg("delta_d") = 0.01, py::arg("mu0") = 0.0, py::arg("mu1") = 1.0,
        py::arg("sigma2") = 1.0, py::arg("window") = py::none(), py::arg("seed") = 0, py::arg("threads") = 0);
}
