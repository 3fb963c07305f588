#pragma once

#include <cstdint>
#include <stdexcept>

namespace polyasim {

// Counter-keyed random stream: the pair (master_seed, stream_index) fully
// determines the output sequence, so replicate i of an experiment can be
// assigned stream i and produce the same numbers no matter which worker
// runs it. Internally a xoshiro256++ engine seeded via splitmix64.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

    std::uint64_t next_u64();

    // Uniform in [0,1) with 53 random bits.
    double uniform();

    // Uniform in [lo, hi).
    double uniform(double lo, double hi);

private:
    std::uint64_t state_[4];
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
};

// Elementary samplers. All are pure functions of the stream state: the
// sequence of variates is reproducible from (master_seed, stream_index).
double sample_exponential(RngStream& rng, double rate);
double sample_normal(RngStream& rng, double mean = 0.0, double sd = 1.0);
double sample_gamma(RngStream& rng, double shape, double scale);
long long sample_poisson(RngStream& rng, double lambda);
long long sample_binomial(RngStream& rng, long long n, double p);
bool sample_bernoulli(RngStream& rng, double p);

// Quantile-coupled Poisson draw: k = F^{-1}(u) for the Poisson(lambda) CDF.
// Feeding the same u at different lambdas yields a monotone coupling, used
// for common-random-number derivative estimates.
long long poisson_icdf(double lambda, double u);

// Deterministic sub-seed for namespacing independent experiments under one
// master seed; distinct tags give statistically unrelated stream families.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

} // namespace polyasim
