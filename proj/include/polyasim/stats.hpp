#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace polyasim {

// Global per-test significance level used throughout the verification suites.
inline constexpr double kAlpha = 1e-3;

struct TestReport {
    std::string name;
    double statistic = 0.0;
    double p_value = 1.0;
    long long n = 0;
    double alpha = kAlpha;
    bool passed = false;
    std::string seed_info;
    std::string details;

    nlohmann::ordered_json to_json() const;
};

// One-sample Kolmogorov–Smirnov against a continuous cdf, asymptotic p-value
// with the small-sample adjustment (sqrt(n) + 0.12 + 0.11/sqrt(n)) * D.
TestReport ks_test(std::string name, std::vector<double> samples,
                   const std::function<double(double)>& cdf, double alpha = kAlpha);

// Pearson chi-square goodness of fit. `observed` and `expected` are counts on
// the same categories and scale; adjacent tail/head bins are pooled until every
// expected count is >= 5, and dof = pooled categories - 1.
TestReport chi_square_gof(std::string name, const std::vector<long long>& observed,
                          const std::vector<double>& expected, double alpha = kAlpha);

// Two-sample chi-square homogeneity test on shared categories, with the same
// pooling rule applied to the smaller of the two expected counts per bin.
TestReport chi_square_two_sample(std::string name, const std::vector<long long>& counts_a,
                                 const std::vector<long long>& counts_b, double alpha = kAlpha);

// Empirical-correlation independence check: passes iff |corr| < 3/sqrt(n).
// The reported p-value is the two-sided normal tail of corr*sqrt(n), so the
// declared level is fixed at 2*Phi(-3) to keep "passed <=> p > alpha".
TestReport independence_test(std::string name, const std::vector<double>& xs,
                             const std::vector<double>& ys);

// Mean within 3*sqrt(target_var/n) of target, sample variance within 3
// asymptotic standard errors (via the sample fourth moment) of target_var.
TestReport moment_check(std::string name, const std::vector<double>& samples, double target_mean,
                        double target_var);

// Bins integer samples into categories [lo, hi] with values above hi clamped
// into the top bin; convenience for the chi-square entry points.
std::vector<long long> bin_counts(const std::vector<long long>& samples, long long lo,
                                  long long hi);

} // namespace polyasim
