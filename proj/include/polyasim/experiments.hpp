#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "polyasim/stats.hpp"

namespace polyasim {

// Outcome of one verification criterion: a bundle of test reports plus an
// overall verdict. `waived` marks a criterion whose failing reports are all
// explained by a quantified resolution limit (see the lattice-floor note in
// the CLT criterion); such a criterion is reported as a documented failure
// rather than a green pass.
struct CriterionResult {
    int index = 0;
    std::string name;
    bool passed = false;
    bool waived = false;
    std::string note;
    std::vector<TestReport> reports;

    bool acceptable() const { return passed || waived; }
    nlohmann::ordered_json to_json() const;
};

// Exact sup-distance between the CDF of Poisson(lambda), standardized by its
// own mean and standard deviation, and the standard normal CDF. This is the
// deterministic floor a KS statistic converges to when lattice-valued samples
// are tested against their Gaussian limit; it decays like 0.2/sqrt(lambda).
double poisson_normal_ks_floor(double lambda);

// Critical D of the one-sample KS test at level alpha for sample size n,
// i.e. the adjusted statistic threshold mapped back to a plain sup-distance.
double ks_critical_d(long long n, double alpha = kAlpha);

CriterionResult criterion_marginal_law(std::uint64_t seed, unsigned threads);
CriterionResult criterion_sampler_equivalence(std::uint64_t seed, unsigned threads);
CriterionResult criterion_thinning(std::uint64_t seed, unsigned threads);
CriterionResult criterion_condensation(std::uint64_t seed, unsigned threads);
CriterionResult criterion_backward_kernel(std::uint64_t seed, unsigned threads);
CriterionResult criterion_arrival_times(std::uint64_t seed, unsigned threads);
CriterionResult criterion_kolmogorov(std::uint64_t seed, unsigned threads);
CriterionResult criterion_restaurant_bridge(std::uint64_t seed, unsigned threads);
CriterionResult criterion_multiplicity_walk(std::uint64_t seed, unsigned threads);
CriterionResult criterion_hydro_ode(std::uint64_t seed, unsigned threads);
CriterionResult criterion_lln(std::uint64_t seed, unsigned threads);
CriterionResult criterion_clt(std::uint64_t seed, unsigned threads);
CriterionResult criterion_mgf(std::uint64_t seed, unsigned threads);

// All thirteen criteria in order. Every random quantity below descends from
// `seed` through derive_seed and per-replicate stream indices, so the output
// is a pure function of `seed` alone, independent of `threads`.
std::vector<CriterionResult> run_verify_suite(std::uint64_t seed, unsigned threads);

} // namespace polyasim
