#include "qcd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qcd {

namespace {

void require_sigma2(double sigma2) {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw ValidationError("sigma2 must be positive and finite, got " + std::to_string(sigma2));
    }
}

void require_nonempty(const PrefixState& state) {
    if (state.size() < 1) throw ValidationError("statistic requested on an empty stream");
}

void require_split(const PrefixState& state) {
    if (state.size() < 2) {
        throw ValidationError("two-sided statistic needs at least 2 observations, got " +
                              std::to_string(state.size()));
    }
}

// Unscaled one-sided score: (n - k + 1) * (mean(k..n) - mu0)^2.
// Multiplying by 1 / (2 sigma2) gives post_split_score.
inline double raw_post_score(const double* c, std::int64_t k, std::int64_t n, double mu0) {
    const double len = static_cast<double>(n - k + 1);
    const double dev = (c[n] - c[k - 1]) / len - mu0;
    return len * dev * dev;
}

// Unscaled two-sided score at split k < n.
inline double raw_both_score(const double* c, std::int64_t k, std::int64_t n, double overall_mean) {
    const double head = static_cast<double>(k);
    const double tail = static_cast<double>(n - k);
    const double head_dev = c[k] / head - overall_mean;
    const double tail_dev = (c[n] - c[k]) / tail - overall_mean;
    return head * head_dev * head_dev + tail * tail_dev * tail_dev;
}

struct ScoreRange {
    std::int64_t first;
    std::int64_t last;
};

// Hot loops: counters are carried as doubles and the max reduction is
// declared so that the compiler can vectorize them (-fopenmp-simd).
double max_post_score(const double* c, ScoreRange range, std::int64_t n, double mu0) {
    double best = 0.0;
    const double total = c[n];
    const double end = static_cast<double>(n + 1);
    const double first = static_cast<double>(range.first);
    const auto count = static_cast<int>(range.last - range.first + 1);
    const double* before = c + range.first - 1;
#pragma omp simd reduction(max : best)
    for (int i = 0; i < count; ++i) {
        const double len = end - (first + static_cast<double>(i));
        const double dev = (total - before[i]) / len - mu0;
        const double v = len * dev * dev;
        best = v > best ? v : best;
    }
    return best;
}

double max_both_score(const double* c, ScoreRange range, std::int64_t n, double overall_mean) {
    double best = 0.0;
    const double total = c[n];
    const double size = static_cast<double>(n);
    const double first = static_cast<double>(range.first);
    const auto count = static_cast<int>(range.last - range.first + 1);
    const double* head_sum = c + range.first;
#pragma omp simd reduction(max : best)
    for (int i = 0; i < count; ++i) {
        const double head = first + static_cast<double>(i);
        const double tail = size - head;
        const double head_dev = head_sum[i] / head - overall_mean;
        const double tail_dev = (total - head_sum[i]) / tail - overall_mean;
        const double v = head * head_dev * head_dev + tail * tail_dev * tail_dev;
        best = v > best ? v : best;
    }
    return best;
}

// log(sum_k exp(score(k) * scale) + unit_terms) given peak = max_k score(k) * scale.
template <typename Score>
double log_sum_scores(ScoreRange range, Score score, double scale, double peak, int unit_terms) {
    if (unit_terms > 0) peak = std::max(peak, 0.0);
    double total = unit_terms * std::exp(-peak);
    for (std::int64_t k = range.first; k <= range.last; ++k) total += std::exp(score(k) * scale - peak);
    return peak + std::log(total);
}

}  // namespace

Window Window::recent(std::int64_t size) {
    if (size < 1) throw ValidationError("window must be at least 1, got " + std::to_string(size));
    Window w;
    w.size_ = size;
    return w;
}

std::int64_t Window::size() const {
    if (!size_) throw ValidationError("full window has no finite size");
    return *size_;
}

void PrefixState::append(double x) {
    // Neumaier's variant of Kahan summation.
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        compensation_ += (sum_ - t) + x;
    } else {
        compensation_ += (x - t) + sum_;
    }
    sum_ = t;
    cumsum_.push_back(sum_ + compensation_);
}

double PrefixState::segment_sum(std::int64_t k, std::int64_t n) const {
    if (k < 1 || n > size() || k > n + 1) {
        throw ValidationError("segment [" + std::to_string(k) + ", " + std::to_string(n) +
                              "] out of range for " + std::to_string(size()) + " samples");
    }
    return cumsum_[static_cast<std::size_t>(n)] - cumsum_[static_cast<std::size_t>(k - 1)];
}

double PrefixState::segment_mean(std::int64_t k, std::int64_t n) const {
    if (k < 1 || k > n || n > size()) {
        throw ValidationError("segment [" + std::to_string(k) + ", " + std::to_string(n) +
                              "] out of range for " + std::to_string(size()) + " samples");
    }
    return segment_sum(k, n) / static_cast<double>(n - k + 1);
}

void PrefixState::clear() {
    cumsum_.assign(1, 0.0);
    sum_ = 0.0;
    compensation_ = 0.0;
}

PrefixState prefix_append(PrefixState state, double x) {
    state.append(x);
    return state;
}

double kl_gauss(double x, double y, double sigma2) {
    require_sigma2(sigma2);
    const double d = x - y;
    return d * d / (2.0 * sigma2);
}

double llr_gauss(double x, double mu0, double mu1, double sigma2) {
    require_sigma2(sigma2);
    return ((mu1 - mu0) * x + (mu0 * mu0 - mu1 * mu1) / 2.0) / sigma2;
}

double cusum_update(double c_prev, double llr) noexcept { return std::max(c_prev, 0.0) + llr; }

double sr_update(double s_prev, double lr) {
    if (!(lr > 0.0)) throw ValidationError("likelihood ratio must be positive");
    return (s_prev + 1.0) * lr;
}

double log_sr_update(double log_s_prev, double log_lr) noexcept {
    // log(S + 1) = max(a, 0) + log1p(exp(-|a|)).
    const double grown = std::max(log_s_prev, 0.0) + std::log1p(std::exp(-std::abs(log_s_prev)));
    return grown + log_lr;
}

double logsumexp(std::span<const double> values) {
    if (values.empty()) throw ValidationError("logsumexp of an empty sequence");
    const double peak = *std::max_element(values.begin(), values.end());
    if (std::isinf(peak)) return peak;
    double total = 0.0;
    for (double v : values) total += std::exp(v - peak);
    return peak + std::log(total);
}

double post_split_score(const PrefixState& state, std::int64_t k, std::int64_t n, double mu0,
                        double sigma2) {
    return static_cast<double>(n - k + 1) * kl_gauss(state.segment_mean(k, n), mu0, sigma2);
}

double both_split_score(const PrefixState& state, std::int64_t k, std::int64_t n, double sigma2) {
    const double overall = state.segment_mean(1, n);
    const double head = static_cast<double>(k) * kl_gauss(state.segment_mean(1, k), overall, sigma2);
    if (k == n) return head;
    return head + static_cast<double>(n - k) * kl_gauss(state.segment_mean(k + 1, n), overall, sigma2);
}

std::int64_t post_candidate_count(std::int64_t n, Window window) {
    return n < 1 ? 0 : n - window.first_candidate(n) + 1;
}

std::int64_t both_candidate_count(std::int64_t n, Window window, bool include_degenerate_split) {
    if (n < 2) return include_degenerate_split && n == 1 ? 1 : 0;
    return n - window.first_candidate(n) + (include_degenerate_split ? 1 : 0);
}

double glr_post_stat(const PrefixState& state, double mu0, double sigma2, Window window) {
    require_sigma2(sigma2);
    require_nonempty(state);
    const std::int64_t n = state.size();
    return max_post_score(state.cumsum().data(), {window.first_candidate(n), n}, n, mu0) / (2.0 * sigma2);
}

double gsr_post_logstat(const PrefixState& state, double mu0, double sigma2, Window window) {
    require_sigma2(sigma2);
    require_nonempty(state);
    const std::int64_t n = state.size();
    const double* c = state.cumsum().data();
    const ScoreRange range{window.first_candidate(n), n};
    const double scale = 1.0 / (2.0 * sigma2);
    return log_sum_scores(
        range, [&](std::int64_t k) { return raw_post_score(c, k, n, mu0); }, scale,
        max_post_score(c, range, n, mu0) * scale, 0);
}

double glr_both_stat(const PrefixState& state, double sigma2, Window window) {
    require_sigma2(sigma2);
    require_split(state);
    const std::int64_t n = state.size();
    const double* c = state.cumsum().data();
    const double overall = c[n] / static_cast<double>(n);
    return max_both_score(c, {window.first_candidate(n), n - 1}, n, overall) / (2.0 * sigma2);
}

double gsr_both_logstat(const PrefixState& state, double sigma2, Window window, bool include_degenerate_split) {
    require_sigma2(sigma2);
    require_split(state);
    const std::int64_t n = state.size();
    const double* c = state.cumsum().data();
    const double overall = c[n] / static_cast<double>(n);
    const ScoreRange range{window.first_candidate(n), n - 1};
    const double scale = 1.0 / (2.0 * sigma2);
    return log_sum_scores(
        range, [&](std::int64_t k) { return raw_both_score(c, k, n, overall); }, scale,
        max_both_score(c, range, n, overall) * scale, include_degenerate_split ? 1 : 0);
}

}  // namespace qcd
