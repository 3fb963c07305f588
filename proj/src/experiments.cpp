#include "polyasim/experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polyasim/crp.hpp"
#include "polyasim/dist.hpp"
#include "polyasim/hydro.hpp"
#include "polyasim/measure.hpp"
#include "polyasim/mprw.hpp"
#include "polyasim/parallel.hpp"
#include "polyasim/polya.hpp"
#include "polyasim/rng.hpp"
#include "polyasim/scrp.hpp"
#include "polyasim/special.hpp"

namespace polyasim {

namespace {

BaseMeasure one_window(double mass) { return BaseMeasure({Window{"B", mass}}); }

std::string seed_note(std::uint64_t seed, std::uint64_t tag) {
    return "master_seed=" + std::to_string(seed) + " tag=" + std::to_string(tag);
}

double pois_pmf(double lambda, long long k) {
    if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(static_cast<double>(k) * std::log(lambda) - lambda -
                    std::lgamma(static_cast<double>(k) + 1.0));
}

// Expected counts on bins 0..hi where the top bin absorbs the upper tail,
// matching the clamping convention of bin_counts.
std::vector<double> expected_from_pmf(long long n_samples, long long hi,
                                      const std::function<double(long long)>& pmf) {
    std::vector<double> expected(static_cast<std::size_t>(hi) + 1, 0.0);
    double cum = 0.0;
    for (long long k = 0; k < hi; ++k) {
        const double p = pmf(k);
        expected[static_cast<std::size_t>(k)] = static_cast<double>(n_samples) * p;
        cum += p;
    }
    expected[static_cast<std::size_t>(hi)] =
        static_cast<double>(n_samples) * std::max(0.0, 1.0 - cum);
    return expected;
}

// Normal test of an empirical proportion against an exact value.
TestReport proportion_check(std::string name, long long hits, long long n, double p0) {
    TestReport r;
    r.name = std::move(name);
    const double phat = static_cast<double>(hits) / static_cast<double>(n);
    const double se = std::sqrt(p0 * (1.0 - p0) / static_cast<double>(n));
    const double z = std::abs(phat - p0) / se;
    r.statistic = z;
    r.p_value = 2.0 * normal_cdf(-z);
    r.n = n;
    r.alpha = 2.0 * normal_cdf(-3.0);
    r.passed = z < 3.0;
    r.details = "phat=" + format_double(phat) + " target=" + format_double(p0);
    return r;
}

// Deterministic pass/fail wrapped as a report (p in {0,1} keeps the global
// "passed iff p > alpha" convention intact).
TestReport exact_check(std::string name, bool ok, double statistic, long long n,
                       std::string details) {
    TestReport r;
    r.name = std::move(name);
    r.statistic = statistic;
    r.p_value = ok ? 1.0 : 0.0;
    r.n = n;
    r.alpha = kAlpha;
    r.passed = ok;
    r.details = std::move(details);
    return r;
}

CriterionResult finalize(int index, std::string name, std::vector<TestReport> reports) {
    CriterionResult c;
    c.index = index;
    c.name = std::move(name);
    c.reports = std::move(reports);
    c.passed = std::all_of(c.reports.begin(), c.reports.end(),
                           [](const TestReport& r) { return r.passed; });
    if (c.passed) {
        c.note = "all checks passed";
    } else {
        c.note = "failed:";
        for (const auto& r : c.reports)
            if (!r.passed) c.note += " " + r.name;
    }
    return c;
}

} // namespace

nlohmann::ordered_json CriterionResult::to_json() const {
    nlohmann::ordered_json j;
    j["index"] = index;
    j["name"] = name;
    j["passed"] = passed;
    j["waived"] = waived;
    j["note"] = note;
    j["reports"] = nlohmann::ordered_json::array();
    for (const auto& r : reports) j["reports"].push_back(r.to_json());
    return j;
}

double poisson_normal_ks_floor(double lambda) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("poisson_normal_ks_floor: lambda must be positive");
    const double sd = std::sqrt(lambda);
    const long long lo =
        std::max<long long>(0, static_cast<long long>(std::floor(lambda - 12.0 * sd)) - 2);
    const long long hi = static_cast<long long>(std::ceil(lambda + 12.0 * sd)) + 2;
    // F(k) = P(Poisson(lambda) <= k) = Q(k + 1, lambda).
    double f_prev = lo > 0 ? gamma_q(static_cast<double>(lo), lambda) : 0.0;
    double d = 0.0;
    for (long long k = lo; k <= hi; ++k) {
        const double fk = gamma_q(static_cast<double>(k) + 1.0, lambda);
        const double phi = normal_cdf((static_cast<double>(k) - lambda) / sd);
        d = std::max(d, std::abs(fk - phi));
        d = std::max(d, std::abs(phi - f_prev));
        f_prev = fk;
    }
    return d;
}

double ks_critical_d(long long n, double alpha) {
    if (n < 1) throw std::invalid_argument("ks_critical_d: n must be positive");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("ks_critical_d: alpha in (0,1)");
    double lo = 0.2, hi = 5.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (kolmogorov_sf(mid) > alpha)
            lo = mid;
        else
            hi = mid;
    }
    const double k_crit = 0.5 * (lo + hi);
    const double sn = std::sqrt(static_cast<double>(n));
    return k_crit / (sn + 0.12 + 0.11 / sn);
}

// --- 1. Marginal law along a path ------------------------------------------

CriterionResult criterion_marginal_law(std::uint64_t seed, unsigned threads) {
    const double rhoB = 2.0;
    const std::vector<double> grid{0.2, 0.4, 0.6};
    const long long n = 100000;
    const std::uint64_t s1 = derive_seed(seed, 1001);
    const BaseMeasure base = one_window(rhoB);

    struct Draw {
        long long final_count = 0;
        int monotone_violations = 0;
    };
    auto draws = run_replicates(n, threads, [&](long long i) {
        RngStream rng(s1, static_cast<std::uint64_t>(i));
        const Trajectory traj = sample_path(grid, base, rng);
        Draw d;
        d.final_count = count(traj.states.back(), base.window("B"));
        for (std::size_t k = 0; k + 1 < traj.states.size(); ++k)
            if (!dominates(traj.states[k + 1], traj.states[k])) ++d.monotone_violations;
        return d;
    });

    std::vector<long long> counts;
    counts.reserve(static_cast<std::size_t>(n));
    long long violations = 0;
    for (const auto& d : draws) {
        counts.push_back(d.final_count);
        violations += d.monotone_violations;
    }

    NegativeBinomial nb(rhoB, 0.6);
    auto observed = bin_counts(counts, 0, 30);
    auto expected = expected_from_pmf(n, 30, [&](long long k) { return nb.pmf(k); });

    std::vector<TestReport> reports;
    reports.push_back(chi_square_gof("marginal-count-law", observed, expected));
    reports.back().seed_info = seed_note(seed, 1001);
    reports.push_back(exact_check("path-monotone", violations == 0,
                                  static_cast<double>(violations), n,
                                  "later states must dominate earlier states"));
    reports.back().seed_info = seed_note(seed, 1001);
    return finalize(1, "marginal-law", std::move(reports));
}

// --- 2. Urn sampler vs Poisson-profile sampler ------------------------------

CriterionResult criterion_sampler_equivalence(std::uint64_t seed, unsigned threads) {
    const double z = 0.5;
    const double rhoB = 1.0;
    const long long n = 100000;
    const std::uint64_t s_urn = derive_seed(seed, 2001);
    const std::uint64_t s_prof = derive_seed(seed, 2002);
    const BaseMeasure base = one_window(rhoB);

    // Joint key (count capped at 12, atom count capped at 8), flattened.
    const long long c_cap = 12, a_cap = 8;
    const std::size_t cells = static_cast<std::size_t>((c_cap + 1) * (a_cap + 1));
    auto key_of = [&](const PointConfiguration& cfg) {
        const long long c = std::min<long long>(cfg.total_count(), c_cap);
        const long long a = std::min<long long>(static_cast<long long>(cfg.atom_count()), a_cap);
        return static_cast<std::size_t>(c * (a_cap + 1) + a);
    };
    auto is_double_singleton = [](const PointConfiguration& cfg) {
        return cfg.atom_count() == 1 && cfg.total_count() == 2;
    };

    struct Draw {
        std::size_t key_urn = 0;
        std::size_t key_prof = 0;
        bool ds_urn = false;
        bool ds_prof = false;
    };
    auto draws = run_replicates(n, threads, [&](long long i) {
        PolyaParams p(z, base, "B");
        Draw d;
        RngStream rng_u(s_urn, static_cast<std::uint64_t>(i));
        const PointConfiguration cfg_u = sample_urn(p, PointConfiguration{}, rng_u);
        d.key_urn = key_of(cfg_u);
        d.ds_urn = is_double_singleton(cfg_u);
        RngStream rng_p(s_prof, static_cast<std::uint64_t>(i));
        const PointConfiguration cfg_p = sample_profile_method(p, rng_p);
        d.key_prof = key_of(cfg_p);
        d.ds_prof = is_double_singleton(cfg_p);
        return d;
    });

    std::vector<long long> counts_urn(cells, 0), counts_prof(cells, 0);
    long long ds_urn = 0, ds_prof = 0;
    for (const auto& d : draws) {
        ++counts_urn[d.key_urn];
        ++counts_prof[d.key_prof];
        ds_urn += d.ds_urn ? 1 : 0;
        ds_prof += d.ds_prof ? 1 : 0;
    }

    // P(one atom of multiplicity two) at z = 1/2, rho(B) = 1: the Poisson
    // factor contributes log(2) e^{-log 2} and the log-series factor
    // (1/2)^2 / (2 log 2); the product is exactly 1/16.
    const double p_ds = 0.0625;

    std::vector<TestReport> reports;
    reports.push_back(chi_square_two_sample("sampler-joint-law", counts_urn, counts_prof));
    reports.back().seed_info = seed_note(seed, 2001) + "," + std::to_string(2002);
    reports.push_back(proportion_check("urn-double-singleton", ds_urn, n, p_ds));
    reports.back().seed_info = seed_note(seed, 2001);
    reports.push_back(proportion_check("profile-double-singleton", ds_prof, n, p_ds));
    reports.back().seed_info = seed_note(seed, 2002);
    return finalize(2, "sampler-equivalence", std::move(reports));
}

// --- 3. Thinning invariance --------------------------------------------------

CriterionResult criterion_thinning(std::uint64_t seed, unsigned threads) {
    const double rhoB = 2.0;
    const long long n = 100000;
    const BaseMeasure base = one_window(rhoB);
    struct Case {
        double z;
        double q;
        long long hi;
        std::uint64_t tag;
    };
    const std::vector<Case> cases{{0.5, 0.5, 25, 3001}, {0.8, 0.25, 30, 3002}};

    std::vector<TestReport> reports;
    for (const auto& cs : cases) {
        const std::uint64_t s = derive_seed(seed, cs.tag);
        auto samples = run_replicates(n, threads, [&](long long i) {
            RngStream rng(s, static_cast<std::uint64_t>(i));
            PolyaParams p(cs.z, base, "B");
            const PointConfiguration cfg = sample_profile_method(p, rng);
            const PointConfiguration thinned = thin(cfg, cs.q, rng);
            return count(thinned, base.window("B"));
        });
        NegativeBinomial nb(rhoB, gamma_param(cs.z, cs.q));
        auto observed = bin_counts(samples, 0, cs.hi);
        auto expected = expected_from_pmf(n, cs.hi, [&](long long k) { return nb.pmf(k); });
        reports.push_back(chi_square_gof("thinned-law-z" + format_double(cs.z) + "-q" +
                                             format_double(cs.q),
                                         observed, expected));
        reports.back().seed_info = seed_note(seed, cs.tag);
        reports.back().details += " gamma=" + format_double(gamma_param(cs.z, cs.q));
    }
    return finalize(3, "thinning", std::move(reports));
}

// --- 4. Two-stage condensation ----------------------------------------------

CriterionResult criterion_condensation(std::uint64_t seed, unsigned threads) {
    const double rhoB = 2.0;
    const double z = 0.7, gamma = 0.3;
    const long long n = 100000;
    const std::uint64_t s = derive_seed(seed, 4001);
    const BaseMeasure base = one_window(rhoB);

    auto samples = run_replicates(n, threads, [&](long long i) {
        RngStream rng(s, static_cast<std::uint64_t>(i));
        PolyaParams p(z, base, "B");
        return count(condense(p, gamma, rng), base.window("B"));
    });
    NegativeBinomial nb(rhoB, z);
    auto observed = bin_counts(samples, 0, 40);
    auto expected = expected_from_pmf(n, 40, [&](long long k) { return nb.pmf(k); });

    std::vector<TestReport> reports;
    reports.push_back(chi_square_gof("condensed-law", observed, expected));
    reports.back().seed_info = seed_note(seed, 4001);
    return finalize(4, "condensation", std::move(reports));
}

// --- 5. Backward kernel -------------------------------------------------------

CriterionResult criterion_backward_kernel(std::uint64_t seed, unsigned threads) {
    const double rhoB = 2.0;
    const double t = 0.5, s_time = 0.25;
    const long long n = 100000;
    const std::uint64_t s = derive_seed(seed, 5001);
    const BaseMeasure base = one_window(rhoB);

    auto samples = run_replicates(n, threads, [&](long long i) {
        RngStream rng(s, static_cast<std::uint64_t>(i));
        PolyaParams p(t, base, "B");
        const PointConfiguration yt = sample_urn(p, PointConfiguration{}, rng);
        const PointConfiguration ys = backward_step(yt, TimePair(s_time, t), rng);
        return count(ys, base.window("B"));
    });
    NegativeBinomial nb(rhoB, s_time);
    auto observed = bin_counts(samples, 0, 20);
    auto expected = expected_from_pmf(n, 20, [&](long long k) { return nb.pmf(k); });

    std::vector<TestReport> reports;
    reports.push_back(chi_square_gof("backward-thinned-law", observed, expected));
    reports.back().seed_info = seed_note(seed, 5001);
    return finalize(5, "backward-kernel", std::move(reports));
}

// --- 6. Arrival-time laws -----------------------------------------------------

CriterionResult criterion_arrival_times(std::uint64_t seed, unsigned threads) {
    const long long n = 20000;
    const std::vector<double> rhos{0.5, 1.0, 3.0};
    const std::vector<long long> ms{1, 2, 5};

    std::vector<TestReport> reports;
    for (std::size_t ri = 0; ri < rhos.size(); ++ri) {
        const double rhoB = rhos[ri];
        const std::uint64_t s = derive_seed(seed, 6001 + ri);
        auto draws = run_replicates(n, threads, [&](long long i) {
            RngStream rng(s, static_cast<std::uint64_t>(i));
            return sample_arrivals_stick(rhoB, 5, rng);
        });
        for (long long m : ms) {
            std::vector<double> taus;
            taus.reserve(static_cast<std::size_t>(n));
            for (const auto& d : draws) taus.push_back(d[static_cast<std::size_t>(m - 1)]);
            BetaLaw beta(static_cast<double>(m), rhoB);
            reports.push_back(ks_test("arrival-ks-rho" + format_double(rhoB) + "-m" +
                                          std::to_string(m),
                                      std::move(taus), [&](double x) { return beta.cdf(x); }));
            reports.back().seed_info = seed_note(seed, 6001 + ri);
        }
    }

    // The joint density of the 2nd and 3rd arrival (m = 2) at rho(B) = 3 must
    // integrate to one over the triangle 0 <= s <= t <= 1.
    {
        const ArrivalLaw law(2, 3.0);
        auto outer = [&](double s_val) {
            if (s_val <= 0.0 || s_val >= 1.0 - 1e-14) return 0.0;
            return integrate([&](double t_val) { return law.joint_density(s_val, t_val); },
                             s_val, 1.0, 1e-11);
        };
        const double total = integrate(outer, 0.0, 1.0, 1e-10);
        const double err = std::abs(total - 1.0);
        reports.push_back(exact_check("arrival-joint-normalization", err <= 1e-8, err, 0,
                                      "integral=" + format_double(total)));
    }
    return finalize(6, "arrival-times", std::move(reports));
}

// --- 7. Kolmogorov forward equation ------------------------------------------

CriterionResult criterion_kolmogorov(std::uint64_t seed, unsigned threads) {
    const double rhoB = 1.0;
    const double h = 0.01;
    const long long n = 1000000;
    const CountFunctional f = make_capped_count(Window{"B", rhoB}, 50);
    const std::vector<double> ts{0.3, 0.5, 0.7};

    std::vector<TestReport> reports;
    KolmogorovCheck mid{};
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
        const double t = ts[ti];
        const std::uint64_t s = derive_seed(seed, 7001 + ti);
        const KolmogorovCheck kc = kolmogorov_residual(f, t, h, n, s, threads);
        if (t == 0.5) mid = kc;
        const double z = std::abs(kc.lhs - kc.rhs) / kc.mc_se;
        TestReport r;
        r.name = "kolmogorov-residual-t" + format_double(t);
        r.statistic = z;
        r.p_value = 2.0 * normal_cdf(-z);
        r.n = n;
        r.alpha = 2.0 * normal_cdf(-3.0);
        r.passed = z < 3.0;
        r.seed_info = seed_note(seed, 7001 + ti);
        r.details = "lhs=" + format_double(kc.lhs) + " rhs=" + format_double(kc.rhs) +
                    " paired_se=" + format_double(kc.mc_se);
        reports.push_back(std::move(r));
    }

    // At t = 1/2 and rho(B) = 1 the expected count is t/(1-t) with derivative
    // 1/(1-t)^2 = 4; the cap at 50 shifts this by less than 1e-12.
    auto value_check = [&](std::string name, double value, double se) {
        TestReport r;
        r.name = std::move(name);
        const double z = std::abs(value - 4.0) / se;
        r.statistic = z;
        r.p_value = 2.0 * normal_cdf(-z);
        r.n = n;
        r.alpha = 2.0 * normal_cdf(-3.0);
        r.passed = z < 3.0;
        r.seed_info = seed_note(seed, 7002);
        r.details = "value=" + format_double(value) + " target=4 se=" + format_double(se);
        return r;
    };
    reports.push_back(value_check("kolmogorov-lhs-value-t0.5", mid.lhs, mid.se_lhs));
    reports.push_back(value_check("kolmogorov-rhs-value-t0.5", mid.rhs, mid.se_rhs));
    return finalize(7, "kolmogorov-equation", std::move(reports));
}

// --- 8. Restaurant bridge -----------------------------------------------------

CriterionResult criterion_restaurant_bridge(std::uint64_t seed, unsigned threads) {
    std::vector<TestReport> reports;

    // (a) Law of the seating of the first four arrivals, against exact
    // enumeration, for three table weights.
    {
        const long long n = 100000;
        const std::vector<double> thetas{0.5, 1.0, 2.0};
        for (std::size_t tj = 0; tj < thetas.size(); ++tj) {
            const double theta = thetas[tj];
            const std::uint64_t s = derive_seed(seed, 8001 + tj);
            const BaseMeasure base = one_window(theta);
            const auto law = enumerate_crp(theta, 4);
            std::vector<std::string> keys;
            keys.reserve(law.size());
            for (const auto& kv : law) keys.push_back(kv.first);

            auto draws = run_replicates(n, threads, [&](long long i) {
                RngStream rng(s, static_cast<std::uint64_t>(i));
                const auto events = simulate_arrival_events(base, "B", 4, rng);
                return extract_seating(events).encode();
            });
            std::map<std::string, long long> freq;
            for (const auto& k : draws) ++freq[k];
            std::vector<long long> observed;
            std::vector<double> expected;
            long long seen = 0;
            for (const auto& k : keys) {
                const auto it = freq.find(k);
                const long long c = it == freq.end() ? 0 : it->second;
                seen += c;
                observed.push_back(c);
                expected.push_back(static_cast<double>(n) * law.at(k));
            }
            if (seen != n)
                throw std::logic_error("restaurant bridge: simulated seating outside the "
                                       "enumerated support");
            reports.push_back(chi_square_gof("bridge-seating-chisq-theta" + format_double(theta),
                                             observed, expected));
            reports.back().seed_info = seed_note(seed, 8001 + tj);
        }
    }

    // (a') The same law through grid-refinement extraction, which never looks
    // at individual arrival events.
    {
        const long long n = 20000;
        const double theta = 1.0;
        const std::uint64_t s = derive_seed(seed, 8004);
        const BaseMeasure base = one_window(theta);
        const auto law = enumerate_crp(theta, 4);
        auto draws = run_replicates(n, threads, [&](long long i) {
            RngStream rng(s, static_cast<std::uint64_t>(i));
            return extract_seating_grid(base, "B", 4, 0.9, 30, rng).encode();
        });
        std::map<std::string, long long> freq;
        for (const auto& k : draws) ++freq[k];
        std::vector<long long> observed;
        std::vector<double> expected;
        for (const auto& kv : law) {
            const auto it = freq.find(kv.first);
            observed.push_back(it == freq.end() ? 0 : it->second);
            expected.push_back(static_cast<double>(n) * kv.second);
        }
        reports.push_back(chi_square_gof("bridge-grid-extraction", observed, expected));
        reports.back().seed_info = seed_note(seed, 8004);
    }

    // (b) Mean and variance of the table count after seven customers.
    {
        const long long n = 100000;
        const double theta = 1.0;
        const long long customers = 7;
        const std::uint64_t s = derive_seed(seed, 8005);
        const BaseMeasure base = one_window(theta);
        auto draws = run_replicates(n, threads, [&](long long i) {
            RngStream rng(s, static_cast<std::uint64_t>(i));
            const auto events = simulate_arrival_events(base, "B", customers, rng);
            return static_cast<double>(extract_seating(events).table_count());
        });
        const double mean = expected_tables(theta, customers);
        double var = 0.0;
        for (long long k = 0; k < customers; ++k) {
            const double p = theta / (theta + static_cast<double>(k));
            var += p * (1.0 - p);
        }
        reports.push_back(moment_check("bridge-table-moments", draws, mean, var));
        reports.back().seed_info = seed_note(seed, 8005);
        reports.back().details += " target_mean=" + format_double(mean) +
                                  " target_var=" + format_double(var);
    }

    // (c) Superposition of independent processes adds the masses.
    {
        const long long n = 100000;
        const std::uint64_t s = derive_seed(seed, 8006);
        const BaseMeasure base_a = one_window(1.0);
        const BaseMeasure base_b = one_window(2.0);
        const std::vector<double> grid{0.5};
        auto samples = run_replicates(n, threads, [&](long long i) {
            RngStream rng_a(s, 2 * static_cast<std::uint64_t>(i));
            RngStream rng_b(s, 2 * static_cast<std::uint64_t>(i) + 1);
            const Trajectory ta = sample_path(grid, base_a, rng_a);
            const Trajectory tb = sample_path(grid, base_b, rng_b);
            const Trajectory sum = superpose_processes(ta, tb);
            return count(sum.states[0], Window{"B", 3.0});
        });
        NegativeBinomial nb(3.0, 0.5);
        auto observed = bin_counts(samples, 0, 30);
        auto expected = expected_from_pmf(n, 30, [&](long long k) { return nb.pmf(k); });
        reports.push_back(chi_square_gof("bridge-superposition-law", observed, expected));
        reports.back().seed_info = seed_note(seed, 8006);
    }

    // (d) Sub-window coupling: the restriction to the inner half is contained
    // in the outer state at all times and is itself the smaller process.
    {
        const long long n = 10000;
        const std::uint64_t s = derive_seed(seed, 8007);
        const BaseMeasure base = one_window(2.0);
        const Window inner{"B", 1.0};
        const Window outer{"B", 2.0};
        const std::vector<double> grid{0.3, 0.6};
        struct Draw {
            long long violations = 0;
            long long inner_count = 0;
        };
        auto draws = run_replicates(n, threads, [&](long long i) {
            RngStream rng(s, static_cast<std::uint64_t>(i));
            const Trajectory traj = sample_path(grid, base, rng);
            const NestedCouplingReport rep = nested_coupling_check(traj, inner, outer);
            return Draw{rep.violations, rep.inner_counts[1]};
        });
        long long violations = 0;
        std::vector<long long> inner_counts;
        inner_counts.reserve(static_cast<std::size_t>(n));
        for (const auto& d : draws) {
            violations += d.violations;
            inner_counts.push_back(d.inner_count);
        }
        reports.push_back(exact_check("bridge-coupling-containment", violations == 0,
                                      static_cast<double>(violations), n,
                                      "inner restriction must be dominated at every time"));
        reports.back().seed_info = seed_note(seed, 8007);
        NegativeBinomial nb(1.0, 0.6);
        auto observed = bin_counts(inner_counts, 0, 25);
        auto expected = expected_from_pmf(n, 25, [&](long long k) { return nb.pmf(k); });
        reports.push_back(chi_square_gof("bridge-coupling-inner-law", observed, expected));
        reports.back().seed_info = seed_note(seed, 8007);
    }

    return finalize(8, "restaurant-bridge", std::move(reports));
}

// --- 9. Multiplicity walk -----------------------------------------------------

CriterionResult criterion_multiplicity_walk(std::uint64_t seed, unsigned threads) {
    const double rhoB = 2.0;
    const double t = 0.5;
    const long long n = 100000;
    const long long j_top = 5;
    const std::uint64_t s = derive_seed(seed, 9001);

    struct Draw {
        std::array<long long, 5> eta{};
        long long stacks = 0;
    };
    auto draws = run_replicates(n, threads, [&](long long i) {
        RngStream rng(s, static_cast<std::uint64_t>(i));
        const ProfileTrajectory traj = simulate_events(rhoB, t, rng);
        const MultiplicityProfile eta = traj.terminal();
        Draw d;
        for (long long j = 1; j <= j_top; ++j)
            d.eta[static_cast<std::size_t>(j - 1)] = eta.at(j);
        d.stacks = eta.total();
        return d;
    });

    std::vector<TestReport> reports;
    for (long long j = 1; j <= j_top; ++j) {
        std::vector<long long> samples;
        samples.reserve(static_cast<std::size_t>(n));
        for (const auto& d : draws) samples.push_back(d.eta[static_cast<std::size_t>(j - 1)]);
        const double lambda = rhoB * std::pow(t, static_cast<double>(j)) / static_cast<double>(j);
        const long long hi = j == 1 ? 9 : 6;
        auto observed = bin_counts(samples, 0, hi);
        auto expected = expected_from_pmf(n, hi, [&](long long k) { return pois_pmf(lambda, k); });
        reports.push_back(
            chi_square_gof("walk-site-law-j" + std::to_string(j), observed, expected));
        reports.back().seed_info = seed_note(seed, 9001);
        reports.back().details += " lambda=" + format_double(lambda);
    }
    for (long long a = 1; a <= j_top; ++a) {
        for (long long b = a + 1; b <= j_top; ++b) {
            std::vector<double> xs, ys;
            xs.reserve(static_cast<std::size_t>(n));
            ys.reserve(static_cast<std::size_t>(n));
            for (const auto& d : draws) {
                xs.push_back(static_cast<double>(d.eta[static_cast<std::size_t>(a - 1)]));
                ys.push_back(static_cast<double>(d.eta[static_cast<std::size_t>(b - 1)]));
            }
            reports.push_back(independence_test(
                "walk-independence-j" + std::to_string(a) + "-j" + std::to_string(b), xs, ys));
            reports.back().seed_info = seed_note(seed, 9001);
        }
    }
    {
        std::vector<double> stacks;
        stacks.reserve(static_cast<std::size_t>(n));
        for (const auto& d : draws) stacks.push_back(static_cast<double>(d.stacks));
        const double m = -rhoB * std::log1p(-t);
        reports.push_back(moment_check("walk-stack-moments", stacks, m, m));
        reports.back().seed_info = seed_note(seed, 9001);
        reports.back().details += " target=" + format_double(m);
    }
    return finalize(9, "multiplicity-walk", std::move(reports));
}

// --- 10. Transport equation ---------------------------------------------------

CriterionResult criterion_hydro_ode(std::uint64_t seed, unsigned threads) {
    (void)threads;
    const double t_end = 0.9;
    const long long j_max = 60;

    auto max_err = [&](double step) {
        const HydroState end = hydro_integrate(t_end, j_max, step);
        const std::vector<double> exact = tau_profile(t_end, j_max);
        double err = 0.0;
        for (std::size_t k = 0; k < exact.size(); ++k)
            err = std::max(err, std::abs(end.V[k] - exact[k]));
        return err;
    };

    std::vector<TestReport> reports;
    const auto wall_start = std::chrono::steady_clock::now();
    const double err_fine = max_err(1e-4);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    reports.push_back(exact_check("hydro-accuracy", err_fine <= 1e-8, err_fine, j_max,
                                  "max |V - t^j/j| at t=0.9, step 1e-4, tolerance 1e-8"));
    reports.back().seed_info = seed_note(seed, 10001);

    const double err_coarse = max_err(0.009);
    const double err_half = max_err(0.0045);
    const double ratio = err_half > 0.0 ? err_coarse / err_half : 0.0;
    reports.push_back(exact_check("hydro-order", ratio >= 12.0 && ratio <= 20.0, ratio, j_max,
                                  "err(0.009)/err(0.0045): expected near 16 for a fourth-order "
                                  "scheme; err_coarse=" +
                                      format_double(err_coarse) +
                                      " err_half=" + format_double(err_half)));
    reports.back().seed_info = seed_note(seed, 10001);

    // Recorded as a 0/1 indicator (not a duration) so output bytes stay
    // machine-independent only in the pass direction.
    reports.push_back(exact_check("hydro-runtime", elapsed < 10.0, elapsed < 10.0 ? 1.0 : 0.0,
                                  j_max, "step-1e-4 integration within a 10 second budget"));
    reports.back().seed_info = seed_note(seed, 10001);
    return finalize(10, "hydro-ode", std::move(reports));
}

// --- 11. Law of large numbers for the profile ---------------------------------

CriterionResult criterion_lln(std::uint64_t seed, unsigned threads) {
    const double t = 0.5;
    const std::vector<double> rhos{100.0, 1000.0, 10000.0};
    const long long reps = 100;
    const long long j_top = 10;
    const double sup_tol = 0.05;

    std::vector<double> mean_errs;
    long long hits_at_largest = 0;
    for (std::size_t ri = 0; ri < rhos.size(); ++ri) {
        const double rho = rhos[ri];
        const std::uint64_t s = derive_seed(seed, 11001 + ri);
        auto errs = run_replicates(reps, threads, [&](long long i) {
            RngStream rng(s, static_cast<std::uint64_t>(i));
            double err = 0.0;
            for (long long j = 1; j <= j_top; ++j) {
                const double tau = std::pow(t, static_cast<double>(j)) / static_cast<double>(j);
                const long long c = sample_poisson(rng, rho * tau);
                err = std::max(err, std::abs(static_cast<double>(c) / rho - tau));
            }
            return err;
        });
        double sum = 0.0;
        long long hits = 0;
        for (double e : errs) {
            sum += e;
            if (e <= sup_tol) ++hits;
        }
        mean_errs.push_back(sum / static_cast<double>(reps));
        if (ri + 1 == rhos.size()) hits_at_largest = hits;
    }

    std::vector<TestReport> reports;
    reports.push_back(exact_check("lln-sup-error-rho10000", hits_at_largest >= 99,
                                  static_cast<double>(hits_at_largest), reps,
                                  "replicates with sup_j |eta(j)/rho - t^j/j| <= 0.05 out of "
                                  "100; required >= 99"));
    reports.back().seed_info = seed_note(seed, 11003);

    // Least-squares slope of log mean error against log rho.
    double xbar = 0.0, ybar = 0.0;
    std::vector<double> xs, ys;
    for (std::size_t ri = 0; ri < rhos.size(); ++ri) {
        xs.push_back(std::log(rhos[ri]));
        ys.push_back(std::log(mean_errs[ri]));
        xbar += xs.back();
        ybar += ys.back();
    }
    xbar /= static_cast<double>(xs.size());
    ybar /= static_cast<double>(ys.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t ri = 0; ri < xs.size(); ++ri) {
        sxy += (xs[ri] - xbar) * (ys[ri] - ybar);
        sxx += (xs[ri] - xbar) * (xs[ri] - xbar);
    }
    const double slope = sxy / sxx;
    const bool monotone = mean_errs[0] > mean_errs[1] && mean_errs[1] > mean_errs[2];
    reports.push_back(exact_check(
        "lln-rate-slope", monotone && std::abs(slope + 0.5) <= 0.1, slope,
        reps * static_cast<long long>(rhos.size()),
        "slope of log mean sup-error vs log rho; mean_errs=" + format_double(mean_errs[0]) + "," +
            format_double(mean_errs[1]) + "," + format_double(mean_errs[2])));
    reports.back().seed_info = seed_note(seed, 11001);
    return finalize(11, "lln", std::move(reports));
}

// --- 12. Fluctuation field ------------------------------------------------------

CriterionResult criterion_clt(std::uint64_t seed, unsigned threads) {
    const double rho = 10000.0;
    const long long n = 20000;
    const std::vector<double> ts{0.3, 0.6};
    const long long j_top = 3;

    struct KsMeta {
        std::size_t report_index = 0;
        double t = 0.0;
        long long j = 0;
        double lambda = 0.0;
    };
    std::vector<TestReport> reports;
    std::vector<KsMeta> ks_meta;
    const double crit_d = ks_critical_d(n, kAlpha);

    std::vector<std::vector<double>> cross_counts; // reconstructed counts for (t=0.3, j=3)
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
        const double t = ts[ti];
        const std::uint64_t s = derive_seed(seed, 12001 + ti);
        auto draws = run_replicates(n, threads, [&](long long i) {
            RngStream rng(s, static_cast<std::uint64_t>(i));
            const SignedProfile z = fluct_sample(rho, t, rng);
            std::array<double, 3> out{};
            for (long long j = 1; j <= j_top; ++j)
                out[static_cast<std::size_t>(j - 1)] = z.at(j);
            return out;
        });

        for (long long j = 1; j <= j_top; ++j) {
            std::vector<double> zs;
            zs.reserve(static_cast<std::size_t>(n));
            for (const auto& d : draws) zs.push_back(d[static_cast<std::size_t>(j - 1)]);
            const double var = std::pow(t, static_cast<double>(j)) / static_cast<double>(j);
            const double sd = std::sqrt(var);
            const double lambda = rho * var;
            auto r = ks_test("clt-ks-t" + format_double(t) + "-j" + std::to_string(j),
                             std::move(zs), [sd](double x) { return normal_cdf(x / sd); });
            r.seed_info = seed_note(seed, 12001 + ti);
            const double floor = poisson_normal_ks_floor(lambda);
            r.details += " lattice_floor=" + format_double(floor) +
                         " critical_d=" + format_double(crit_d) +
                         " lambda=" + format_double(lambda);
            ks_meta.push_back(KsMeta{reports.size(), t, j, lambda});
            reports.push_back(std::move(r));
        }
        for (long long a = 1; a <= j_top; ++a) {
            for (long long b = a + 1; b <= j_top; ++b) {
                std::vector<double> xs, ys;
                xs.reserve(static_cast<std::size_t>(n));
                ys.reserve(static_cast<std::size_t>(n));
                for (const auto& d : draws) {
                    xs.push_back(d[static_cast<std::size_t>(a - 1)]);
                    ys.push_back(d[static_cast<std::size_t>(b - 1)]);
                }
                reports.push_back(independence_test("clt-indep-t" + format_double(t) + "-j" +
                                                        std::to_string(a) + "-j" +
                                                        std::to_string(b),
                                                    xs, ys));
                reports.back().seed_info = seed_note(seed, 12001 + ti);
            }
        }
        if (t == 0.3) {
            cross_counts.emplace_back();
            auto& v = cross_counts.back();
            v.reserve(static_cast<std::size_t>(n));
            for (const auto& d : draws) v.push_back(d[2]);
        }
    }

    // Cross-check at the coarsest lattice (t = 0.3, j = 3, lambda = 90): the
    // counts reconstructed from the standardized field must match the exact
    // Poisson law, isolating any KS failure above as pure discretization.
    {
        const double lambda = rho * std::pow(0.3, 3.0) / 3.0;
        const double sqrt_rho = std::sqrt(rho);
        std::vector<long long> ks;
        ks.reserve(cross_counts[0].size());
        for (double z : cross_counts[0])
            ks.push_back(std::llround(z * sqrt_rho + lambda));
        auto observed = bin_counts(ks, 0, 140);
        auto expected =
            expected_from_pmf(n, 140, [&](long long k) { return pois_pmf(lambda, k); });
        reports.push_back(chi_square_gof("clt-lattice-crosscheck", observed, expected));
        reports.back().seed_info = seed_note(seed, 12001);
        reports.back().details += " lambda=" + format_double(lambda);
    }

    CriterionResult c = finalize(12, "clt", std::move(reports));
    if (!c.passed) {
        // A failed KS report is explained when the lattice law's exact
        // sup-distance from its Gaussian limit already sits at (or above) 70%
        // of the critical distance: no sample size makes the test consistent
        // against its own discretization. Everything else must pass.
        bool all_explained = true;
        std::string why;
        for (std::size_t i = 0; i < c.reports.size(); ++i) {
            if (c.reports[i].passed) continue;
            bool explained = false;
            for (const auto& meta : ks_meta) {
                if (meta.report_index != i) continue;
                const double floor = poisson_normal_ks_floor(meta.lambda);
                if (floor >= 0.7 * crit_d) {
                    explained = true;
                    why += " " + c.reports[i].name + ": exact lattice-vs-normal sup-distance " +
                           format_double(floor) + " vs critical distance " +
                           format_double(crit_d) + " at n=" + std::to_string(n) +
                           " (lambda=" + format_double(meta.lambda) +
                           ", floor decays like 0.2/sqrt(lambda));";
                }
                break;
            }
            if (!explained) all_explained = false;
        }
        if (all_explained) {
            c.waived = true;
            c.note = "documented failure: the standardized counts live on a lattice of spacing "
                     "1/sqrt(rho), and against the continuous Gaussian limit the KS statistic "
                     "converges to the exact discretization floor, not to zero;" +
                     why + " the lattice cross-check confirms the simulated counts follow the "
                           "exact finite-rho law.";
        }
    }
    return c;
}

// --- 13. MGF and fluctuation generator -----------------------------------------

CriterionResult criterion_mgf(std::uint64_t seed, unsigned threads) {
    const TestFunction g{{1.0, 0.5, 0.25}};
    const double s_time = 0.5;
    const double rho = 10000.0;
    const long long n = 200000;
    const std::uint64_t s_mc = derive_seed(seed, 13001);

    const MgfCheck mc = mgf_check(g, s_time, rho, n, s_mc, threads);

    auto z_report = [&](std::string name, double value, double target, double se,
                        double allowance) {
        TestReport r;
        r.name = std::move(name);
        const double excess = std::max(0.0, std::abs(value - target) - allowance);
        const double z = excess / se;
        r.statistic = std::abs(value - target) / se;
        r.p_value = 2.0 * normal_cdf(-z);
        r.n = n;
        r.alpha = 2.0 * normal_cdf(-3.0);
        r.passed = z < 3.0;
        r.seed_info = seed_note(seed, 13001);
        r.details = "value=" + format_double(value) + " target=" + format_double(target) +
                    " se=" + format_double(se);
        if (allowance > 0.0) r.details += " skew_allowance=" + format_double(allowance);
        return r;
    };

    std::vector<TestReport> reports;
    reports.push_back(
        z_report("mgf-limit-field", mc.empirical_limit, mc.analytic, mc.se_limit, 0.0));
    reports.push_back(z_report("mgf-generator-derivative", mc.generator_over_mgf, mc.analytic_dds,
                               mc.se_generator_over_mgf, 0.0));

    // The finite-rho field carries a third-moment bias of order
    // sum_j (s^j/j) g(j)^3 / (6 sqrt(rho)) in the log-MGF; twice that bound is
    // granted on top of the Monte Carlo band.
    double skew = 0.0;
    for (std::size_t k = 0; k < g.g.size(); ++k) {
        const double j = static_cast<double>(k + 1);
        skew += std::pow(s_time, j) / j * std::pow(std::abs(g.g[k]), 3.0);
    }
    skew = 2.0 * skew / (6.0 * std::sqrt(rho));
    reports.push_back(
        z_report("mgf-prelimit-field", mc.empirical_prelimit, mc.analytic, mc.se_prelimit, skew));

    // The two algebraic forms of the drift term must agree to near machine
    // precision on random signed profiles.
    {
        const DifferentiableFunctional f = make_exp_functional(g);
        const std::uint64_t s_xi = derive_seed(seed, 13002);
        double max_rel = 0.0;
        for (int k = 0; k < 25; ++k) {
            RngStream rng(s_xi, static_cast<std::uint64_t>(k));
            SignedProfile xi;
            for (long long j = 1; j <= 6; ++j) xi.set(j, rng.uniform(-2.0, 2.0));
            const double a = limit_fluct_generator_apply(f, xi, s_time, false);
            const double b = limit_fluct_generator_apply(f, xi, s_time, true);
            const double rel = std::abs(a - b) / std::max(1.0, std::abs(a));
            max_rel = std::max(max_rel, rel);
        }
        reports.push_back(exact_check("mgf-drift-forms", max_rel <= 1e-10, max_rel, 25,
                                      "two summation orders of the drift term"));
        reports.back().seed_info = seed_note(seed, 13002);
    }

    for (auto& r : reports)
        if (r.details.find("analytic=") == std::string::npos)
            r.details += " analytic=" + format_double(mc.analytic) +
                         " analytic_dds=" + format_double(mc.analytic_dds);
    return finalize(13, "mgf-generator", std::move(reports));
}

std::vector<CriterionResult> run_verify_suite(std::uint64_t seed, unsigned threads) {
    std::vector<CriterionResult> out;
    out.push_back(criterion_marginal_law(seed, threads));
    out.push_back(criterion_sampler_equivalence(seed, threads));
    out.push_back(criterion_thinning(seed, threads));
    out.push_back(criterion_condensation(seed, threads));
    out.push_back(criterion_backward_kernel(seed, threads));
    out.push_back(criterion_arrival_times(seed, threads));
    out.push_back(criterion_kolmogorov(seed, threads));
    out.push_back(criterion_restaurant_bridge(seed, threads));
    out.push_back(criterion_multiplicity_walk(seed, threads));
    out.push_back(criterion_hydro_ode(seed, threads));
    out.push_back(criterion_lln(seed, threads));
    out.push_back(criterion_clt(seed, threads));
    out.push_back(criterion_mgf(seed, threads));
    return out;
}

} // namespace polyasim
