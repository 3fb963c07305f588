#include "polyasim/rng.hpp"

#include <cmath>

namespace polyasim {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_seed_(master_seed), stream_index_(stream_index) {
    std::uint64_t s = master_seed ^ (stream_index * 0xA24BAED4963EE407ULL + 0x9FB21C651E98DF25ULL);
    for (auto& word : state_) word = splitmix64(s);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
    // xoshiro256++
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double sample_exponential(RngStream& rng, double rate) {
    if (!(rate > 0)) throw std::invalid_argument("sample_exponential: rate must be positive");
    return -std::log1p(-rng.uniform()) / rate;
}

double sample_normal(RngStream& rng, double mean, double sd) {
    // Marsaglia polar method; the spare variate is discarded to keep the
    // stream state a pure function of the draw count.
    double u, v, s;
    do {
        u = 2.0 * rng.uniform() - 1.0;
        v = 2.0 * rng.uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return mean + sd * u * std::sqrt(-2.0 * std::log(s) / s);
}

double sample_gamma(RngStream& rng, double shape, double scale) {
    if (!(shape > 0) || !(scale > 0)) throw std::invalid_argument("sample_gamma: parameters must be positive");
    if (shape < 1.0) {
        // Boost to shape+1 (Marsaglia-Tsang trick).
        const double u = rng.uniform();
        return sample_gamma(rng, shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = sample_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

namespace {

// Hormann's transformed rejection (PTRD) for large means.
long long poisson_ptrd(RngStream& rng, double lambda) {
    const double smu = std::sqrt(lambda);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    const double log_lambda = std::log(lambda);
    for (;;) {
        double u = rng.uniform() - 0.5;
        double v = rng.uniform();
        double us = 0.5 - std::fabs(u);
        double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<long long>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * log_lambda - lambda - std::lgamma(k + 1.0)) {
            return static_cast<long long>(k);
        }
    }
}

} // namespace

long long sample_poisson(RngStream& rng, double lambda) {
    if (lambda < 0 || !std::isfinite(lambda)) throw std::invalid_argument("sample_poisson: bad lambda");
    if (lambda == 0.0) return 0;
    if (lambda < 30.0) {
        // Knuth product-of-uniforms.
        const double limit = std::exp(-lambda);
        long long k = 0;
        double prod = rng.uniform();
        while (prod > limit) {
            ++k;
            prod *= rng.uniform();
        }
        return k;
    }
    return poisson_ptrd(rng, lambda);
}

long long poisson_icdf(double lambda, double u) {
    if (lambda < 0) throw std::invalid_argument("poisson_icdf: bad lambda");
    if (lambda == 0.0) return 0;
    double p = std::exp(-lambda);
    double cum = p;
    long long k = 0;
    // Forward summation; adequate for the moderate means this is used with.
    while (u > cum && k < 100000000) {
        ++k;
        p *= lambda / static_cast<double>(k);
        cum += p;
        if (p == 0.0) break;
    }
    return k;
}

long long sample_binomial(RngStream& rng, long long n, double p) {
    if (n < 0 || p < 0.0 || p > 1.0) throw std::invalid_argument("sample_binomial: bad parameters");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    if (n <= 128) {
        long long k = 0;
        for (long long i = 0; i < n; ++i)
            if (rng.uniform() < p) ++k;
        return k;
    }
    // Split at the median order statistic (beta recursion); exact and
    // O(log n) levels deep.
    const long long half = (n + 1) / 2;
    const double x = sample_gamma(rng, static_cast<double>(half), 1.0);
    const double y = sample_gamma(rng, static_cast<double>(n - half + 1), 1.0);
    const double bsplit = x / (x + y);
    if (bsplit <= p) return half + sample_binomial(rng, n - half, (p - bsplit) / (1.0 - bsplit));
    return sample_binomial(rng, half - 1, p / bsplit);
}

bool sample_bernoulli(RngStream& rng, double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("sample_bernoulli: bad p");
    return rng.uniform() < p;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t x = seed ^ (tag * 0xD6E8FEB86659FD93ULL + 0x2545F4914F6CDD1DULL);
    splitmix64(x);
    return splitmix64(x);
}

} // namespace polyasim
