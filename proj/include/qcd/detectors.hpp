#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qcd/stats.hpp"
#include "qcd/thresholds.hpp"

namespace qcd {

enum class DetectorFamily {
    cusum_fixed,  // CuSum against a fixed threshold b
    sr_fixed,     // Shiryaev-Roberts, log S_n against a fixed threshold b
    tvt_cusum,    // CuSum against log(zeta(r) n^r / delta_f)
    glr_post,     // known pre-change mean, unknown post-change mean
    gsr_post,
    glr_both,     // both means unknown
    gsr_both,
};

std::string_view to_string(DetectorFamily family);
std::optional<DetectorFamily> parse_detector_family(std::string_view name);

bool uses_known_post_mean(DetectorFamily family) noexcept;
bool uses_known_pre_mean(DetectorFamily family) noexcept;
bool is_two_sided(DetectorFamily family) noexcept;
bool is_shiryaev_roberts_sum(DetectorFamily family) noexcept;

inline constexpr std::int64_t kDefaultWindow = 700;
inline constexpr std::int64_t kDefaultFullGsrCap = 5000;

/// Detector configuration. Which of the known parameters are required
/// depends on the family; see validate_detector_kind.
struct DetectorKind {
    DetectorFamily family = DetectorFamily::glr_both;
    std::optional<double> mu0;
    std::optional<double> mu1;
    double sigma2 = 1.0;
    Window window = Window::recent(kDefaultWindow);
    double fixed_threshold = 0.0;
    double r = 2.0;
    bool include_degenerate_split = false;
    // Allows a truncated-sum GSR. No guarantee is claimed for it.
    bool experimental_windowed_gsr = false;
    std::int64_t full_gsr_cap = kDefaultFullGsrCap;

    static DetectorKind cusum_fixed(double threshold, double mu0, double mu1, double sigma2);
    static DetectorKind sr_fixed(double log_threshold, double mu0, double mu1, double sigma2);
    static DetectorKind tvt_cusum(double r, double mu0, double mu1, double sigma2);
    static DetectorKind glr_post(double mu0, double sigma2, Window window = Window::recent(kDefaultWindow));
    static DetectorKind gsr_post(double mu0, double sigma2, Window window = Window::full());
    static DetectorKind glr_both(double sigma2, Window window = Window::recent(kDefaultWindow));
    static DetectorKind gsr_both(double sigma2, Window window = Window::full());
};

/// The time-varying threshold used by a family; empty for fixed-threshold families.
std::optional<ThresholdKind> threshold_kind_for(const DetectorKind& kind);

void validate_detector_kind(const DetectorKind& kind);

struct StepOutcome {
    std::int64_t n = 0;
    double statistic = 0.0;
    double threshold = 0.0;
    bool alarm = false;

    friend bool operator==(const StepOutcome&, const StepOutcome&) = default;
};

/// One-pass stopping rule. Feed observations with step(); once the statistic
/// reaches the threshold the detector freezes and keeps returning the firing
/// outcome.
class Detector {
public:
    Detector(DetectorKind kind, double delta_f);

    StepOutcome step(double x);

    /// Clears all state so the instance can be reused for a new stream.
    void reset();

    const DetectorKind& kind() const noexcept { return kind_; }
    double delta_f() const noexcept { return delta_f_; }
    std::int64_t steps() const noexcept { return n_; }
    std::optional<std::int64_t> fired_at() const noexcept { return fired_at_; }
    const StepOutcome& last() const noexcept { return last_; }
    const PrefixState& prefix() const noexcept { return prefix_; }

    void reserve(std::int64_t horizon) { prefix_.reserve(horizon); }

    /// When set, GSR steps that provably cannot alarm (G_n + log|K| below the
    /// threshold) skip the exponential sum and report that upper bound as the
    /// statistic. Alarm decisions are unchanged.
    void set_decision_only(bool on) noexcept { decision_only_ = on; }

private:
    double next_statistic(double x, double threshold);
    double threshold_at(std::int64_t n) const;

    DetectorKind kind_;
    double delta_f_;
    std::optional<ThresholdKind> threshold_kind_;
    std::int64_t n_ = 0;
    double scalar_ = 0.0;  // C_n for CuSum kinds, log S_n for SR
    PrefixState prefix_;
    std::optional<std::int64_t> fired_at_;
    StepOutcome last_;
    bool decision_only_ = false;
};

Detector make_detector(DetectorKind kind, double delta_f);

struct StoppingReport {
    std::optional<std::int64_t> fired_at;
    std::vector<StepOutcome> trace;
};

/// Folds step() over `series`. The trace holds one outcome per observation
/// up to and including the firing step when `keep_trace` is set.
StoppingReport run_offline(const DetectorKind& kind, double delta_f, std::span<const double> series,
                           bool keep_trace = false);

}  // namespace qcd
