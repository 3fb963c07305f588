#include "polyasim/dist.hpp"

#include <cmath>
#include <stdexcept>

#include "polyasim/special.hpp"

namespace polyasim {

NegativeBinomial::NegativeBinomial(double r_, double z_) : r(r_), z(z_) {
    if (r < 0.0) throw std::invalid_argument("NegativeBinomial: r must be >= 0");
    if (z < 0.0 || z >= 1.0) throw std::invalid_argument("NegativeBinomial: z must be in [0,1)");
}

double NegativeBinomial::pmf(long long k) const {
    if (k < 0) return 0.0;
    if (r == 0.0 || z == 0.0) return k == 0 ? 1.0 : 0.0;
    const double log_p = r * std::log1p(-z) + static_cast<double>(k) * std::log(z) +
                         log_rising_factorial(r, k) - std::lgamma(static_cast<double>(k) + 1.0);
    return std::exp(log_p);
}

long long NegativeBinomial::sample(RngStream& rng) const {
    if (r == 0.0 || z == 0.0) return 0;
    const double lambda = sample_gamma(rng, r, z / (1.0 - z));
    return sample_poisson(rng, lambda);
}

BetaLaw::BetaLaw(double a_, double b_) : a(a_), b(b_) {
    if (!(a > 0) || !(b > 0)) throw std::invalid_argument("BetaLaw: parameters must be positive");
}

double BetaLaw::pdf(double t) const {
    if (t <= 0.0 || t >= 1.0) {
        // Boundary values only matter for a<1 or b<1 integrable singularities.
        if (t == 0.0 && a == 1.0) return b;
        if (t == 1.0 && b == 1.0) return a;
        return 0.0;
    }
    const double log_b = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    return std::exp(log_b + (a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t));
}

double BetaLaw::cdf(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return beta_inc(a, b, t);
}

double BetaLaw::sample(RngStream& rng) const {
    const double x = sample_gamma(rng, a, 1.0);
    const double y = sample_gamma(rng, b, 1.0);
    return x / (x + y);
}

LogSeries::LogSeries(double t, double tail_cutoff) : t_(t) {
    if (!(t > 0.0) || !(t < 1.0)) throw std::invalid_argument("LogSeries: t must be in (0,1)");
    log_norm_ = -std::log1p(-t);
    double term = t / log_norm_; // pmf(1)
    double cum = term;
    cum_.push_back(cum);
    long long j = 1;
    while (1.0 - cum > tail_cutoff && j < 100000000) {
        term *= t_ * static_cast<double>(j) / static_cast<double>(j + 1);
        ++j;
        cum += term;
        cum_.push_back(cum);
    }
}

double LogSeries::pmf(long long j) const {
    if (j < 1) return 0.0;
    return std::exp(static_cast<double>(j) * std::log(t_) - std::log(static_cast<double>(j))) /
           log_norm_;
}

long long LogSeries::sample(RngStream& rng) const {
    const double u = rng.uniform();
    // Binary search over the cached cumulative table.
    if (u <= cum_.back()) {
        long long lo = 0;
        long long hi = static_cast<long long>(cum_.size()) - 1;
        while (lo < hi) {
            const long long mid = (lo + hi) / 2;
            if (u <= cum_[mid]) hi = mid;
            else lo = mid + 1;
        }
        return lo + 1;
    }
    // Tail continuation past the table.
    long long j = static_cast<long long>(cum_.size());
    double cum = cum_.back();
    double term = pmf(j);
    for (;;) {
        term *= t_ * static_cast<double>(j) / static_cast<double>(j + 1);
        ++j;
        cum += term;
        if (u <= cum || term == 0.0) return j;
    }
}

double LogSeries::mean() const {
    return t_ / ((1.0 - t_) * log_norm_);
}

} // namespace polyasim
