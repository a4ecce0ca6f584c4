#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qcd/errors.hpp"

namespace qcd {

/// Candidate set for the generalized statistics: either every split point
/// or only the most recent `size` of them (down-sampled statistic).
class Window {
public:
    static Window full() { return Window{}; }
    static Window recent(std::int64_t size);

    bool is_full() const noexcept { return !size_; }
    std::int64_t size() const;

    /// Smallest admissible candidate k at step n, i.e. max(1, n - size).
    std::int64_t first_candidate(std::int64_t n) const noexcept {
        return size_ && n - *size_ > 1 ? n - *size_ : 1;
    }

    friend bool operator==(const Window&, const Window&) = default;

private:
    std::optional<std::int64_t> size_;
};

/// Running prefix sums of a stream: cumsum[0] = 0, cumsum[i] = X_1 + ... + X_i.
///
/// Sums are accumulated with Neumaier compensation so that segment means stay
/// accurate over long horizons.
class PrefixState {
public:
    PrefixState() = default;

    void append(double x);

    std::int64_t size() const noexcept { return static_cast<std::int64_t>(cumsum_.size()) - 1; }
    std::span<const double> cumsum() const noexcept { return cumsum_; }

    /// X_k + ... + X_n for 1 <= k <= n <= size(); k = n + 1 gives 0.
    double segment_sum(std::int64_t k, std::int64_t n) const;
    /// Empirical mean of X_k..X_n; requires 1 <= k <= n <= size().
    double segment_mean(std::int64_t k, std::int64_t n) const;

    void clear();
    void reserve(std::int64_t n) { cumsum_.reserve(static_cast<std::size_t>(n) + 1); }

private:
    std::vector<double> cumsum_{0.0};
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

PrefixState prefix_append(PrefixState state, double x);

/// (x - y)^2 / (2 sigma2): KL divergence between equal-variance Gaussians.
double kl_gauss(double x, double y, double sigma2);

/// log f_{mu1}(x) / f_{mu0}(x) for Gaussians with common variance.
double llr_gauss(double x, double mu0, double mu1, double sigma2);

/// CuSum recursion C_n = max(C_{n-1}, 0) + llr, with C_0 = 0.
double cusum_update(double c_prev, double llr) noexcept;

/// Shiryaev-Roberts recursion S_n = (S_{n-1} + 1) * lr, with S_0 = 0.
double sr_update(double s_prev, double lr);

/// Same recursion in log space: log S_n from log S_{n-1} and log lr.
/// Use -infinity for log S_0.
double log_sr_update(double log_s_prev, double log_lr) noexcept;

/// log(sum(exp(values))) evaluated by shifting by the maximum.
double logsumexp(std::span<const double> values);

/// Score of candidate k at step n when the pre-change mean is known:
/// (n - k + 1) * kl(mean(k..n); mu0).
double post_split_score(const PrefixState& state, std::int64_t k, std::int64_t n, double mu0,
                        double sigma2);

/// Score of split k at step n when both means are unknown:
/// k * kl(mean(1..k); mean(1..n)) + (n - k) * kl(mean(k+1..n); mean(1..n)).
/// The k = n split scores 0.
double both_split_score(const PrefixState& state, std::int64_t k, std::int64_t n, double sigma2);

/// GLR statistic with known pre-change mean: sup over candidates of post_split_score.
double glr_post_stat(const PrefixState& state, double mu0, double sigma2, Window window = Window::full());

/// log of the generalized SR statistic with known pre-change mean.
double gsr_post_logstat(const PrefixState& state, double mu0, double sigma2,
                        Window window = Window::full());

/// GLR statistic with both means unknown, over splits {first..n-1}. Requires n >= 2.
double glr_both_stat(const PrefixState& state, double sigma2, Window window = Window::full());

/// log of the generalized SR statistic with both means unknown. Requires n >= 2.
/// `include_degenerate_split` adds the k = n term, which equals exp(0) = 1.
double gsr_both_logstat(const PrefixState& state, double sigma2, Window window = Window::full(),
                        bool include_degenerate_split = false);

/// Number of candidates the two-sided statistics use at step n.
std::int64_t both_candidate_count(std::int64_t n, Window window, bool include_degenerate_split = false);
/// Number of candidates the one-sided statistics use at step n.
std::int64_t post_candidate_count(std::int64_t n, Window window);

}  // namespace qcd
