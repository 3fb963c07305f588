#pragma once

#include <vector>

#include "polyasim/rng.hpp"

namespace polyasim {

// Negative binomial with real shape r and success parameter z in [0,1):
// pmf(k) = (1-z)^r z^k r^[k] / k!. Sampling goes through the Gamma-Poisson
// mixture Poisson(Gamma(r, z/(1-z))), which realizes the law for any real
// r > 0. r = 0 or z = 0 degenerates to the point mass at 0.
struct NegativeBinomial {
    double r;
    double z;

    NegativeBinomial(double r_, double z_);

    double pmf(long long k) const;
    long long sample(RngStream& rng) const;
    double mean() const { return z < 1.0 ? r * z / (1.0 - z) : 0.0; }
    double variance() const { return mean() / (1.0 - z); }
};

struct BetaLaw {
    double a;
    double b;

    BetaLaw(double a_, double b_);

    double pdf(double t) const;
    double cdf(double t) const;
    double sample(RngStream& rng) const;
    double mean() const { return a / (a + b); }
};

// Logarithmic series law on {1,2,...}: pmf(j) = t^j / (j L), L = -log(1-t).
// Sampling is by inversion against a cached cumulative table; draws landing
// beyond the cached range (tail mass below the cutoff) continue the pmf
// recursion term by term, so no clamping occurs.
class LogSeries {
public:
    explicit LogSeries(double t, double tail_cutoff = 1e-12);

    double t() const { return t_; }
    double pmf(long long j) const;
    long long sample(RngStream& rng) const;
    double mean() const;

    // Number of cached categories (tail mass beyond it < cutoff).
    long long table_size() const { return static_cast<long long>(cum_.size()); }

private:
    double t_;
    double log_norm_;           // L = -log(1-t)
    std::vector<double> cum_;   // cum_[j-1] = P(X <= j)
};

} // namespace polyasim
