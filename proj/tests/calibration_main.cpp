// Calibration audit of the statistical harness: every test type is run under
// its null hypothesis for many independent seeded trials, and the observed
// rejection rate must sit within a factor of three of the declared level.
// A harness that is too eager or too lax here would make every downstream
// verdict meaningless, so this audit is part of the default test tier.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "polyasim/dist.hpp"
#include "polyasim/rng.hpp"
#include "polyasim/special.hpp"
#include "polyasim/stats.hpp"

using namespace polyasim;

namespace {

constexpr int kTrials = 10000;

struct Calibration {
    std::string name;
    long long rejections = 0;
    double declared_alpha = 0.0;

    bool in_band() const {
        const double rate = static_cast<double>(rejections) / kTrials;
        return rate >= declared_alpha / 3.0 && rate <= 3.0 * declared_alpha;
    }
};

Calibration calibrate_ks() {
    Calibration c{"ks_test", 0, kAlpha};
    for (int trial = 0; trial < kTrials; ++trial) {
        RngStream rng(9001, static_cast<std::uint64_t>(trial));
        std::vector<double> u(200);
        for (auto& x : u) x = rng.uniform();
        if (!ks_test("cal", u, [](double x) { return x; }).passed) ++c.rejections;
    }
    return c;
}

Calibration calibrate_chi_square() {
    Calibration c{"chi_square_gof", 0, kAlpha};
    const double lambda = 5.0;
    const int n = 500;
    // Exact Poisson cell probabilities with the tail clamped into the top bin.
    std::vector<double> expected(16);
    double tail = 1.0;
    double p = std::exp(-lambda);
    for (int k = 0; k + 1 < 16; ++k) {
        expected[static_cast<std::size_t>(k)] = p * n;
        tail -= p;
        p *= lambda / (k + 1);
    }
    expected.back() = tail * n;
    for (int trial = 0; trial < kTrials; ++trial) {
        RngStream rng(9002, static_cast<std::uint64_t>(trial));
        std::vector<long long> draws(n);
        for (auto& d : draws) d = sample_poisson(rng, lambda);
        if (!chi_square_gof("cal", bin_counts(draws, 0, 15), expected).passed) ++c.rejections;
    }
    return c;
}

Calibration calibrate_two_sample() {
    Calibration c{"chi_square_two_sample", 0, kAlpha};
    const double lambda = 4.0;
    const int n = 500;
    for (int trial = 0; trial < kTrials; ++trial) {
        RngStream rng(9003, static_cast<std::uint64_t>(trial));
        std::vector<long long> a(n), b(n);
        for (auto& d : a) d = sample_poisson(rng, lambda);
        for (auto& d : b) d = sample_poisson(rng, lambda);
        if (!chi_square_two_sample("cal", bin_counts(a, 0, 14), bin_counts(b, 0, 14)).passed)
            ++c.rejections;
    }
    return c;
}

Calibration calibrate_independence() {
    Calibration c{"independence_test", 0, 2.0 * normal_cdf(-3.0)};
    for (int trial = 0; trial < kTrials; ++trial) {
        RngStream rng(9004, static_cast<std::uint64_t>(trial));
        std::vector<double> x(400), y(400);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = sample_normal(rng, 0.0, 1.0);
            y[i] = sample_normal(rng, 0.0, 1.0);
        }
        if (!independence_test("cal", x, y).passed) ++c.rejections;
    }
    return c;
}

Calibration calibrate_moment() {
    Calibration c{"moment_check", 0, 2.0 * normal_cdf(-3.0)};
    for (int trial = 0; trial < kTrials; ++trial) {
        RngStream rng(9005, static_cast<std::uint64_t>(trial));
        std::vector<double> s(2000);
        for (auto& v : s) v = sample_normal(rng, 1.0, 2.0);
        if (!moment_check("cal", s, 1.0, 4.0).passed) ++c.rejections;
    }
    return c;
}

} // namespace

int main() {
    const Calibration results[] = {
        calibrate_ks(),      calibrate_chi_square(), calibrate_two_sample(),
        calibrate_independence(), calibrate_moment(),
    };
    bool ok = true;
    for (const auto& c : results) {
        const double rate = static_cast<double>(c.rejections) / kTrials;
        std::printf("%-24s rejections=%lld/%d rate=%.2e declared=%.2e band=[%.2e, %.2e] %s\n",
                    c.name.c_str(), c.rejections, kTrials, rate, c.declared_alpha,
                    c.declared_alpha / 3.0, 3.0 * c.declared_alpha,
                    c.in_band() ? "OK" : "OUT OF BAND");
        ok = ok && c.in_band();
    }
    return ok ? 0 : 1;
}
