#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qcd::cli {

enum ExitCode : int { kSuccess = 0, kValidationError = 1, kRuntimeError = 2 };

/// Everything a command may read. Optional fields are those whose absence
/// changes behaviour (a required parameter or a family-dependent default).
struct RunConfig {
    std::string command;
    std::vector<std::string> detectors{"glr-both"};
    std::optional<double> mu0;
    std::optional<double> mu1;
    double sigma2 = 1.0;
    double delta_f = 0.01;
    double delta_d = 0.01;
    std::int64_t horizon = 5000;
    std::string pre_window = "auto";  // integer, "auto", "recommended", "tail" (T - 1000) or "min"
    std::string window = "auto";      // integer, "auto" or "full"
    std::int64_t trials = 2000;
    std::uint64_t seed = 0;
    std::vector<std::int64_t> grid;
    std::string output;
    std::string format = "csv";
    unsigned threads = 0;
    std::string config;

    std::string input;
    std::optional<std::int64_t> change_point;
    double r = 2.0;
    std::optional<double> threshold;
    bool trace = false;
    bool include_degenerate_split = false;
    bool experimental_windowed_gsr = false;
    std::int64_t gsr_cap = 5000;
    std::optional<std::int64_t> oracle_delay;
    std::string axis;
    std::vector<double> values;
    bool allow_variance_override = false;
};

/// Runs one command. `args` excludes the program name. Output that the
/// command does not send to --output goes to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qcd::cli
