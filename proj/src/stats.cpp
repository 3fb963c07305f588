#include "polyasim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "polyasim/special.hpp"

namespace polyasim {

nlohmann::ordered_json TestReport::to_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["statistic"] = statistic;
    j["p_value"] = p_value;
    j["n"] = n;
    j["alpha"] = alpha;
    j["passed"] = passed;
    j["seed_info"] = seed_info;
    j["details"] = details;
    return j;
}

TestReport ks_test(std::string name, std::vector<double> samples,
                   const std::function<double(double)>& cdf, double alpha) {
    if (samples.empty()) throw std::invalid_argument("ks_test: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
        d = std::max(d, f - static_cast<double>(i) / n);
    }
    const double adj = d * (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n));

    TestReport r;
    r.name = std::move(name);
    r.statistic = d;
    r.p_value = kolmogorov_sf(adj);
    r.n = static_cast<long long>(samples.size());
    r.alpha = alpha;
    r.passed = r.p_value > alpha;
    return r;
}

namespace {

// Pools adjacent categories until every pooled bin has weight >= cutoff: a
// right-to-left sweep merges light bins into their left neighbor (so sparse
// tails and interior gaps collapse), then the head is merged rightward if it
// is still light. The weight vector drives the pooling, and every column of
// `columns` is pooled identically.
void pool_bins(std::vector<double>& weight, std::vector<std::vector<double>*> columns,
               double cutoff) {
    auto merge = [&](std::size_t into, std::size_t from) {
        weight[into] += weight[from];
        for (auto* col : columns) (*col)[into] += (*col)[from];
        weight.erase(weight.begin() + static_cast<std::ptrdiff_t>(from));
        for (auto* col : columns) col->erase(col->begin() + static_cast<std::ptrdiff_t>(from));
    };
    for (std::size_t i = weight.size(); i-- > 1;)
        if (weight[i] < cutoff) merge(i - 1, i);
    while (weight.size() > 1 && weight.front() < cutoff) merge(0, 1);
}

TestReport pearson_report(std::string name, const std::vector<double>& observed,
                          const std::vector<double>& expected, long long extra_dof_loss,
                          long long n, double alpha) {
    double stat = 0.0;
    for (std::size_t k = 0; k < observed.size(); ++k) {
        const double diff = observed[k] - expected[k];
        stat += diff * diff / expected[k];
    }
    const long long dof = static_cast<long long>(observed.size()) - 1 - extra_dof_loss;
    if (dof < 1) throw std::invalid_argument(name + ": fewer than two pooled categories");

    TestReport r;
    r.name = std::move(name);
    r.statistic = stat;
    r.p_value = chi2_sf(stat, static_cast<double>(dof));
    r.n = n;
    r.alpha = alpha;
    r.passed = r.p_value > alpha;
    r.details = "dof=" + std::to_string(dof);
    return r;
}

} // namespace

TestReport chi_square_gof(std::string name, const std::vector<long long>& observed,
                          const std::vector<double>& expected, double alpha) {
    if (observed.size() != expected.size())
        throw std::invalid_argument("chi_square_gof: category mismatch");
    const long long total = std::accumulate(observed.begin(), observed.end(), 0LL);
    if (total == 0) throw std::invalid_argument("chi_square_gof: all-zero observed counts");

    std::vector<double> obs(observed.begin(), observed.end());
    std::vector<double> exp = expected;
    std::vector<double> weight = exp;
    pool_bins(weight, {&obs, &exp}, 5.0);
    return pearson_report(std::move(name), obs, exp, 0, total, alpha);
}

TestReport chi_square_two_sample(std::string name, const std::vector<long long>& counts_a,
                                 const std::vector<long long>& counts_b, double alpha) {
    if (counts_a.size() != counts_b.size())
        throw std::invalid_argument("chi_square_two_sample: category mismatch");
    const double na = static_cast<double>(std::accumulate(counts_a.begin(), counts_a.end(), 0LL));
    const double nb = static_cast<double>(std::accumulate(counts_b.begin(), counts_b.end(), 0LL));
    if (na == 0.0 || nb == 0.0)
        throw std::invalid_argument("chi_square_two_sample: a sample is empty");

    std::vector<double> a(counts_a.begin(), counts_a.end());
    std::vector<double> b(counts_b.begin(), counts_b.end());
    // Pool on the smaller of the two per-bin expected counts.
    std::vector<double> weight(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double pooled = (a[k] + b[k]) / (na + nb);
        weight[k] = std::min(na, nb) * pooled;
    }
    pool_bins(weight, {&a, &b}, 5.0);

    double stat = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double pooled = (a[k] + b[k]) / (na + nb);
        const double ea = na * pooled;
        const double eb = nb * pooled;
        stat += (a[k] - ea) * (a[k] - ea) / ea + (b[k] - eb) * (b[k] - eb) / eb;
    }
    const long long dof = static_cast<long long>(a.size()) - 1;
    if (dof < 1) throw std::invalid_argument("chi_square_two_sample: fewer than two pooled bins");

    TestReport r;
    r.name = std::move(name);
    r.statistic = stat;
    r.p_value = chi2_sf(stat, static_cast<double>(dof));
    r.n = static_cast<long long>(na + nb);
    r.alpha = alpha;
    r.passed = r.p_value > alpha;
    r.details = "dof=" + std::to_string(dof);
    return r;
}

TestReport independence_test(std::string name, const std::vector<double>& xs,
                             const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("independence_test: length mismatch");
    const std::size_t n = xs.size();
    if (n < 2) throw std::invalid_argument("independence_test: need at least two pairs");

    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("independence_test: zero-variance margin");
    const double corr = sxy / std::sqrt(sxx * syy);
    const double z = std::abs(corr) * std::sqrt(static_cast<double>(n));

    TestReport r;
    r.name = std::move(name);
    r.statistic = corr;
    r.p_value = 2.0 * normal_cdf(-z);
    r.n = static_cast<long long>(n);
    r.alpha = 2.0 * normal_cdf(-3.0);
    r.passed = r.p_value > r.alpha;
    return r;
}

TestReport moment_check(std::string name, const std::vector<double>& samples, double target_mean,
                        double target_var) {
    if (samples.empty()) throw std::invalid_argument("moment_check: empty sample");
    const double n = static_cast<double>(samples.size());
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double m2 = 0.0, m4 = 0.0;
    for (double x : samples) {
        const double d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m4 /= n;

    double z_mean;
    double z_var;
    if (target_var == 0.0) {
        // Degenerate target: every sample must sit exactly at the mean.
        const double scale = std::max(1.0, std::abs(target_mean));
        z_mean = std::abs(mean - target_mean) <= 1e-12 * scale ? 0.0 : HUGE_VAL;
        z_var = m2 <= 1e-24 * scale * scale ? 0.0 : HUGE_VAL;
    } else {
        z_mean = std::abs(mean - target_mean) / std::sqrt(target_var / n);
        const double var_of_var = (m4 - m2 * m2) / n;
        z_var = var_of_var > 0.0 ? std::abs(m2 - target_var) / std::sqrt(var_of_var)
                                 : (m2 == target_var ? 0.0 : HUGE_VAL);
    }
    const double z = std::max(z_mean, z_var);

    TestReport r;
    r.name = std::move(name);
    r.statistic = z;
    r.p_value = 2.0 * normal_cdf(-z);
    r.n = static_cast<long long>(samples.size());
    r.alpha = 2.0 * normal_cdf(-3.0);
    r.passed = z < 3.0;
    r.details = "z_mean=" + std::to_string(z_mean) + " z_var=" + std::to_string(z_var);
    return r;
}

std::vector<long long> bin_counts(const std::vector<long long>& samples, long long lo,
                                  long long hi) {
    if (hi < lo) throw std::invalid_argument("bin_counts: hi < lo");
    std::vector<long long> out(static_cast<std::size_t>(hi - lo + 1), 0);
    for (long long s : samples) {
        if (s < lo) throw std::invalid_argument("bin_counts: sample below range");
        const long long k = std::min(s, hi) - lo;
        ++out[static_cast<std::size_t>(k)];
    }
    return out;
}

} // namespace polyasim
