#include "qcd/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <json.hpp>

#include "qcd/bounds.hpp"
#include "qcd/detectors.hpp"
#include "qcd/montecarlo.hpp"
#include "qcd/random.hpp"
#include "qcd/report_io.hpp"

namespace qcd::cli {

namespace {

using nlohmann::json;

constexpr const char* kCommands[] = {"detect", "simulate", "latency", "false-alarm", "bounds", "sweep"};

bool is_command(const std::string& token) {
    return std::find(std::begin(kCommands), std::end(kCommands), token) != std::end(kCommands);
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

std::string json_scalar_text(const json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number_integer()) return value.dump();
    if (value.is_number_float()) return format_real(value.get<double>());
    throw ValidationError("config value must be a string or number: " + value.dump());
}

// Appends config-file entries as flags, skipping any flag given on the
// command line so that explicit flags win.
std::vector<std::string> merge_config_file(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;

    std::ifstream file(path);
    if (!file) throw NumericError("cannot read config file " + path);
    json config;
    try {
        config = json::parse(file);
    } catch (const json::exception& e) {
        throw ValidationError("config file " + path + " is not valid JSON: " + e.what());
    }
    if (!config.is_object()) throw ValidationError("config file must hold a JSON object");

    if ((args.empty() || !is_command(args.front())) && config.contains("command")) {
        args.insert(args.begin(), config.at("command").get<std::string>());
    }
    for (const auto& [key, value] : config.items()) {
        if (key == "command" || key == "config") continue;
        const std::string flag = "--" + key;
        if (has_flag(args, flag)) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
        } else if (value.is_array()) {
            if (value.empty()) continue;
            args.push_back(flag);
            for (const auto& element : value) args.push_back(json_scalar_text(element));
        } else if (!value.is_null()) {
            args.push_back(flag);
            args.push_back(json_scalar_text(value));
        }
    }
    return args;
}

class OutputSink {
public:
    OutputSink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
        if (path.empty()) return;
        file_.open(path, std::ios::binary | std::ios::trunc);
        if (!file_) throw NumericError("cannot open output file " + path);
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }

private:
    std::ofstream file_;
    std::ostream& fallback_;
};

std::int64_t parse_int(const std::string& text, const char* what) {
    std::size_t used = 0;
    std::int64_t value = 0;
    try {
        value = std::stoll(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw ValidationError(std::string(what) + ": not an integer: " + text);
    return value;
}

Window resolve_window(const RunConfig& c, DetectorFamily family) {
    if (c.window == "full") return Window::full();
    if (c.window == "auto") {
        return is_shiryaev_roberts_sum(family) ? Window::full() : Window::recent(kDefaultWindow);
    }
    return Window::recent(parse_int(c.window, "--window"));
}

// `simulated` supplies unit-shift N(0,1) -> N(1,1) defaults for missing means.
TrialDetector build_detector(const RunConfig& c, const std::string& name, double delta_f, bool simulated) {
    if (name == "oracle") {
        if (!c.oracle_delay) throw ValidationError("oracle detector needs --oracle-delay");
        return FixedDelayOracle{*c.oracle_delay};
    }
    const auto family = parse_detector_family(name);
    if (!family) throw ValidationError("unknown detector '" + name + "'");

    DetectorKind kind;
    kind.family = *family;
    kind.sigma2 = c.sigma2;
    kind.mu0 = c.mu0;
    kind.mu1 = c.mu1;
    if (simulated) {
        if (!kind.mu0) kind.mu0 = 0.0;
        if (!kind.mu1) kind.mu1 = 1.0;
    }
    if (!uses_known_pre_mean(*family)) kind.mu0.reset();
    if (!uses_known_post_mean(*family)) kind.mu1.reset();
    kind.window = uses_known_post_mean(*family) ? Window::full() : resolve_window(c, *family);
    kind.r = c.r;
    kind.include_degenerate_split = c.include_degenerate_split;
    kind.experimental_windowed_gsr = c.experimental_windowed_gsr;
    kind.full_gsr_cap = c.gsr_cap;
    if (*family == DetectorFamily::cusum_fixed || *family == DetectorFamily::sr_fixed) {
        if (!c.threshold) throw ValidationError(name + ": missing required parameter --threshold");
        kind.fixed_threshold = *c.threshold;
    }
    validate_detector_kind(kind);
    return DetectorConfig{kind, delta_f};
}

const std::string& single_detector(const RunConfig& c) {
    if (c.detectors.size() != 1) throw ValidationError(c.command + " takes exactly one --detector");
    return c.detectors.front();
}

double scenario_gap(const RunConfig& c) { return std::abs(c.mu1.value_or(1.0) - c.mu0.value_or(0.0)); }

std::int64_t resolve_pre_window(const RunConfig& c, const TrialDetector& detector, std::int64_t horizon,
                                double delta_f, double delta_d, bool sweep) {
    const auto* config = std::get_if<DetectorConfig>(&detector);
    const bool two_sided = config && is_two_sided(config->kind.family);
    std::string mode = c.pre_window;
    if (mode == "auto") mode = two_sided ? (sweep ? "tail" : "recommended") : "0";
    if (mode == "tail") {
        if (horizon <= 1000) throw ValidationError("pre-window T - 1000 needs a horizon above 1000");
        return horizon - 1000;
    }
    if (mode == "recommended" || mode == "min") {
        if (!two_sided) throw ValidationError("--pre-window " + mode + " applies to two-sided detectors only");
        BoundInputs inputs{horizon, delta_f, delta_d, config->kind.sigma2, scenario_gap(c), 0,
                           config->kind.family == DetectorFamily::glr_both ? ThresholdFamily::glr_both
                                                                           : ThresholdFamily::gsr_both};
        return mode == "recommended" ? prewindow_cor1(inputs) : min_prewindow(inputs) + 1;
    }
    return parse_int(mode, "--pre-window");
}

ExperimentPlan build_plan(const RunConfig& c, const std::string& detector_name, std::int64_t horizon,
                          double delta_f, double delta_d, bool sweep) {
    validate_probability(delta_f, "delta_f");
    validate_probability(delta_d, "delta_d");
    ExperimentPlan plan;
    plan.detector = build_detector(c, detector_name, delta_f, true);
    plan.horizon = horizon;
    plan.pre_window = resolve_pre_window(c, plan.detector, horizon, delta_f, delta_d, sweep);
    plan.pre = GaussianModel{c.mu0.value_or(0.0), c.sigma2};
    plan.post = GaussianModel{c.mu1.value_or(1.0), c.sigma2};
    plan.grid = sweep ? std::vector<std::int64_t>{} : c.grid;
    plan.trials_per_point = c.trials;
    plan.base_seed = c.seed;
    plan.delta_d = delta_d;
    plan.allow_variance_override = c.allow_variance_override;
    validate_plan(plan);
    return plan;
}

void require_format(const RunConfig& c) {
    if (c.format != "csv" && c.format != "json") throw ValidationError("--format must be csv or json");
}

int cmd_detect(const RunConfig& c, std::ostream& out) {
    if (c.input.empty()) throw ValidationError("detect needs --input");
    const auto detector = build_detector(c, single_detector(c), c.delta_f, false);
    const auto* config = std::get_if<DetectorConfig>(&detector);
    if (!config) throw ValidationError("detect needs a statistical detector");

    std::ifstream file(c.input);
    if (!file) throw NumericError("cannot read input file " + c.input);
    const auto series = read_observations(file);
    const auto report = run_offline(config->kind, config->delta_f, series, true);

    OutputSink sink(c.output, out);
    if (c.format == "json") {
        json j{{"detector", single_detector(c)},
               {"n_observations", series.size()},
               {"fired_at", report.fired_at ? json(*report.fired_at) : json(nullptr)}};
        if (!report.trace.empty()) {
            j["final_statistic"] = report.trace.back().statistic;
            j["threshold"] = report.trace.back().threshold;
        }
        if (c.trace) {
            json rows = json::array();
            for (const auto& o : report.trace) {
                rows.push_back({{"n", o.n}, {"statistic", o.statistic}, {"threshold", o.threshold},
                                {"alarm", o.alarm}});
            }
            j["trace"] = rows;
        }
        sink.stream() << j.dump(2) << '\n';
        return kSuccess;
    }

    std::ostream& summary = c.trace && !c.output.empty() ? out : sink.stream();
    summary << "detector: " << single_detector(c) << '\n';
    summary << "observations: " << series.size() << '\n';
    summary << "fired_at: " << (report.fired_at ? std::to_string(*report.fired_at) : "none") << '\n';
    if (!report.trace.empty()) {
        summary << "final_statistic: " << format_real(report.trace.back().statistic) << '\n';
        summary << "threshold: " << format_real(report.trace.back().threshold) << '\n';
    }
    if (!report.fired_at) summary << "no alarm\n";
    if (c.trace) write_trace_csv(sink.stream(), report.trace);
    return kSuccess;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
    ChangeScenario scenario{c.horizon, c.change_point, 0, GaussianModel{c.mu0.value_or(0.0), c.sigma2},
                            GaussianModel{c.mu1.value_or(1.0), c.sigma2}};
    const auto series = generate_series(scenario, c.seed);
    OutputSink sink(c.output, out);
    for (double x : series) sink.stream() << format_real(x) << '\n';
    return kSuccess;
}

int cmd_latency(const RunConfig& c, std::ostream& out) {
    const auto plan = build_plan(c, single_detector(c), c.horizon, c.delta_f, c.delta_d, false);
    const auto report = estimate_latency(plan, c.threads);
    OutputSink sink(c.output, out);
    if (c.format == "json") {
        sink.stream() << to_json(report).dump(2) << '\n';
    } else {
        write_latency_csv(sink.stream(), report);
    }
    return kSuccess;
}

int cmd_false_alarm(const RunConfig& c, std::ostream& out) {
    const auto& name = single_detector(c);
    const auto detector = build_detector(c, name, c.delta_f, true);
    const auto estimate =
        estimate_false_alarm(detector, c.horizon, c.trials, c.seed, GaussianModel{c.mu0.value_or(0.0), c.sigma2},
                             c.threads);
    OutputSink sink(c.output, out);
    if (c.format == "json") {
        auto j = to_json(estimate);
        j["detector"] = name;
        j["horizon"] = c.horizon;
        sink.stream() << j.dump(2) << '\n';
    } else {
        write_false_alarm_csv(sink.stream(), estimate, name, c.horizon);
    }
    return kSuccess;
}

int cmd_bounds(const RunConfig& c, std::ostream& out) {
    const auto& name = single_detector(c);
    const auto family = parse_detector_family(name);
    if (!family || !(*family == DetectorFamily::glr_post || *family == DetectorFamily::gsr_post ||
                     is_two_sided(*family))) {
        throw ValidationError("bounds needs one of glr-post, gsr-post, glr-both, gsr-both");
    }
    const ThresholdFamily kind = *family == DetectorFamily::glr_post   ? ThresholdFamily::glr_post
                                 : *family == DetectorFamily::gsr_post ? ThresholdFamily::gsr_post
                                 : *family == DetectorFamily::glr_both ? ThresholdFamily::glr_both
                                                                       : ThresholdFamily::gsr_both;
    BoundInputs inputs{c.horizon, c.delta_f, c.delta_d, c.sigma2, scenario_gap(c), 0, kind};
    validate_bound_inputs(inputs);

    std::vector<std::pair<std::string, json>> rows{
        {"detector", name},      {"horizon", c.horizon}, {"delta_f", c.delta_f}, {"delta_d", c.delta_d},
        {"sigma2", c.sigma2},    {"gap", inputs.gap},    {"beta", horizon_threshold(inputs)},
    };
    if (is_two_sided(*family)) {
        const auto m_min = min_prewindow(inputs);
        const auto m_recommended = prewindow_cor1(inputs);
        inputs.pre_window = (c.pre_window == "auto" || c.pre_window == "recommended") ? m_recommended
                            : c.pre_window == "min"                           ? m_min + 1
                                                                              : parse_int(c.pre_window, "--pre-window");
        rows.emplace_back("m_min", m_min);
        rows.emplace_back("m_recommended", m_recommended);
        rows.emplace_back("pre_window", inputs.pre_window);
        rows.emplace_back("d", latency_bound_both_unknown(inputs));
    } else {
        rows.emplace_back("d", latency_bound_known_pre(inputs));
    }

    OutputSink sink(c.output, out);
    if (c.format == "json") {
        json j = json::object();
        for (const auto& [key, value] : rows) j[key] = value;
        sink.stream() << j.dump(2) << '\n';
    } else {
        sink.stream() << "quantity,value\n";
        for (const auto& [key, value] : rows) {
            sink.stream() << key << ','
                          << (value.is_string() ? value.get<std::string>() : json_scalar_text(value)) << '\n';
        }
    }
    return kSuccess;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
    if (c.axis != "horizon" && c.axis != "delta") throw ValidationError("--axis must be horizon or delta");
    if (c.values.empty()) throw ValidationError("sweep needs at least one value in --values");
    if (c.detectors.empty()) throw ValidationError("sweep needs at least one --detector");
    for (double v : c.values) {
        if (c.axis == "delta") validate_probability(v, "delta");
        if (c.axis == "horizon" && (v < 1.0 || v != std::floor(v))) {
            throw ValidationError("horizon values must be positive integers");
        }
    }

    std::vector<ExperimentPlan> plans;
    std::vector<SweepRow> rows;
    for (double v : c.values) {
        for (const auto& name : c.detectors) {
            const bool by_horizon = c.axis == "horizon";
            const auto horizon = by_horizon ? static_cast<std::int64_t>(v) : c.horizon;
            plans.push_back(build_plan(c, name, horizon, by_horizon ? c.delta_f : v, by_horizon ? c.delta_d : v, true));
            rows.push_back(SweepRow{v, std::nullopt, std::nullopt, name});
        }
    }
    for (std::size_t i = 0; i < plans.size(); ++i) {
        const auto report = estimate_latency(plans[i], c.threads);
        rows[i].empirical_latency = report.empirical_latency;
        rows[i].bound = report.bound;
    }
    OutputSink sink(c.output, out);
    if (c.format == "json") {
        json j = json::array();
        for (const auto& row : rows) {
            j.push_back({{"axis_value", row.axis_value},
                         {"empirical_latency", row.empirical_latency ? json(*row.empirical_latency) : json(nullptr)},
                         {"bound", row.bound ? json(*row.bound) : json(nullptr)},
                         {"detector", row.detector}});
        }
        sink.stream() << j.dump(2) << '\n';
    } else {
        write_sweep_csv(sink.stream(), rows);
    }
    return kSuccess;
}

void add_shared_options(CLI::App& sub, RunConfig& c) {
    sub.add_option("--detector", c.detectors, "Detector: cusum, sr, tvt-cusum, glr-post, gsr-post, glr-both, gsr-both")
        ->expected(1, -1);
    sub.add_option("--mu0", c.mu0, "Pre-change mean (known to cusum, sr, tvt-cusum, glr-post, gsr-post)");
    sub.add_option("--mu1", c.mu1, "Post-change mean");
    sub.add_option("--sigma2", c.sigma2, "Sub-Gaussian variance parameter");
    sub.add_option("--delta-f", c.delta_f, "False-alarm budget");
    sub.add_option("--delta-d", c.delta_d, "Late-detection budget");
    sub.add_option("--horizon", c.horizon, "Horizon T");
    sub.add_option("--pre-window", c.pre_window, "Pre-change window m: integer, auto, recommended, min or tail (T - 1000)");
    sub.add_option("--window", c.window, "Candidate window: integer, auto or full");
    sub.add_option("--trials", c.trials, "Trials per change point");
    sub.add_option("--seed", c.seed, "Base seed");
    sub.add_option("--grid", c.grid, "Explicit change points")->expected(1, -1);
    sub.add_option("--output", c.output, "Output file (stdout when absent)");
    sub.add_option("--format", c.format, "csv or json");
    sub.add_option("--threads", c.threads, "Worker cap (0 = all cores)");
    sub.add_option("--config", c.config, "JSON config file; flags override it");
    sub.add_option("--input", c.input, "Observation file, one value per line");
    sub.add_option("--change-point", c.change_point, "Change point for simulate");
    sub.add_option("--r", c.r, "TVT-CuSum exponent r > 1");
    sub.add_option("--threshold", c.threshold, "Fixed threshold for cusum and sr");
    sub.add_flag("--trace", c.trace, "Emit the per-step trace");
    sub.add_flag("--include-degenerate-split", c.include_degenerate_split, "Add the k = n unit term to GSR sums");
    sub.add_flag("--experimental-windowed-gsr", c.experimental_windowed_gsr, "Allow truncated GSR sums");
    sub.add_option("--gsr-cap", c.gsr_cap, "Largest horizon for unwindowed GSR");
    sub.add_option("--oracle-delay", c.oracle_delay, "Delay of the oracle test detector")->group("");
    sub.add_option("--axis", c.axis, "Sweep axis: horizon or delta");
    sub.add_option("--values", c.values, "Sweep axis values")->expected(1, -1);
    sub.add_flag("--allow-variance-override", c.allow_variance_override,
                 "Accept scenario variances that differ from --sigma2");
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    RunConfig config;
    CLI::App app{"Sequential change detection: GLR/GSR tests, bounds and Monte Carlo latency", "qcd"};
    app.require_subcommand(1);
    for (const char* name : kCommands) {
        auto* sub = app.add_subcommand(name);
        add_shared_options(*sub, config);
        sub->callback([&config, name] { config.command = name; });
    }
    app.get_subcommand("detect")->description("Run a detector over an observation file");
    app.get_subcommand("simulate")->description("Generate a single-change Gaussian stream");
    app.get_subcommand("latency")->description("Estimate the empirical latency by Monte Carlo");
    app.get_subcommand("false-alarm")->description("Estimate the false-alarm probability over the horizon");
    app.get_subcommand("bounds")->description("Evaluate the theoretical latency and pre-window bounds");
    app.get_subcommand("sweep")->description("Latency and bound across horizons or risk levels");

    try {
        auto args = merge_config_file(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }

    try {
        require_format(config);
        if (config.command == "detect") return cmd_detect(config, out);
        if (config.command == "simulate") return cmd_simulate(config, out);
        if (config.command == "latency") return cmd_latency(config, out);
        if (config.command == "false-alarm") return cmd_false_alarm(config, out);
        if (config.command == "bounds") return cmd_bounds(config, out);
        if (config.command == "sweep") return cmd_sweep(config, out);
        throw ValidationError("unknown command " + config.command);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
}

}  // namespace qcd::cli
