#include "polyasim/scrp.hpp"

#include <cmath>
#include <stdexcept>

#include "polyasim/dist.hpp"
#include "polyasim/parallel.hpp"
#include "polyasim/polya.hpp"
#include "polyasim/special.hpp"

namespace polyasim {

TimePair::TimePair(double s_, double t_) : s(s_), t(t_) {
    if (!(0.0 <= s && s <= t && t < 1.0))
        throw std::invalid_argument("TimePair: need 0 <= s <= t < 1");
}

CountFunctional make_capped_count(Window window, long long cap) {
    if (cap < 0) throw std::invalid_argument("make_capped_count: cap must be >= 0");
    return CountFunctional{std::move(window),
                           [cap](long long n) { return static_cast<double>(std::min(n, cap)); },
                           static_cast<double>(cap)};
}

PointConfiguration forward_step(const PointConfiguration& nu, TimePair tp, const BaseMeasure& base,
                                const std::string& window_id, RngStream& rng) {
    const double z = (tp.t - tp.s) / (1.0 - tp.s);
    if (z == 0.0) return nu;
    PointConfiguration boost;
    for (const auto& [loc, m] : nu.atoms())
        if (loc.window_id == window_id) boost.add(loc, m);
    PolyaParams params{z, base, window_id};
    PointConfiguration increment = sample_urn(params, boost, rng);
    return superpose(nu, increment);
}

Trajectory sample_path(const std::vector<double>& grid, const BaseMeasure& base, RngStream& rng) {
    if (grid.empty()) throw std::invalid_argument("sample_path: empty grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 0.0 || grid[i] >= 1.0)
            throw std::invalid_argument("sample_path: grid times must lie in [0,1)");
        if (i > 0 && grid[i] <= grid[i - 1])
            throw std::invalid_argument("sample_path: grid must be strictly increasing");
    }
    Trajectory traj;
    traj.times = grid;
    PointConfiguration state;
    double prev = 0.0;
    for (double t : grid) {
        for (const auto& w : base.windows())
            state = forward_step(state, TimePair{prev, t}, base, w.id, rng);
        traj.states.push_back(state);
        prev = t;
    }
    return traj;
}

PointConfiguration backward_step(const PointConfiguration& nu, TimePair tp, RngStream& rng) {
    if (tp.s == tp.t) return nu;
    if (tp.t == 0.0) throw std::invalid_argument("backward_step: t must be > 0");
    const double q = tp.s * (1.0 - tp.t) / (tp.t * (1.0 - tp.s));
    return thin(nu, q, rng);
}

ArrivalLaw::ArrivalLaw(long long m_, double rhoB_) : m(m_), rhoB(rhoB_) {
    if (m < 0) throw std::invalid_argument("ArrivalLaw: m must be >= 0");
    if (!(rhoB > 0.0)) throw std::invalid_argument("ArrivalLaw: rhoB must be > 0");
}

double ArrivalLaw::survival(double t) const {
    double sum = 0.0;
    double term = 1.0; // t^k rhoB^{[k]} / k! at k = 0
    for (long long k = 0; k <= m; ++k) {
        sum += term;
        term *= t * (rhoB + static_cast<double>(k)) / static_cast<double>(k + 1);
    }
    return std::pow(1.0 - t, rhoB) * sum;
}

double ArrivalLaw::density(double t) const {
    const double log_val = log_rising_factorial(rhoB, m + 1) - std::lgamma(static_cast<double>(m + 1)) +
                           static_cast<double>(m) * std::log(t) + (rhoB - 1.0) * std::log1p(-t);
    return std::exp(log_val);
}

double ArrivalLaw::joint_density(double s, double t) const {
    if (m < 1) throw std::invalid_argument("ArrivalLaw::joint_density: needs m >= 1");
    if (!(0.0 <= s && s <= t && t <= 1.0)) return 0.0;
    const double log_val = log_rising_factorial(rhoB, m + 1) - std::lgamma(static_cast<double>(m)) +
                           (rhoB + static_cast<double>(m) - 1.0) * std::log1p(-t) +
                           static_cast<double>(m - 1) * std::log(s) -
                           static_cast<double>(m + 1) * std::log1p(-s);
    return std::exp(log_val);
}

std::vector<double> sample_arrivals_stick(double rhoB, long long m_max, RngStream& rng) {
    if (!(rhoB > 0.0)) throw std::invalid_argument("sample_arrivals_stick: rhoB must be > 0");
    if (m_max < 1) throw std::invalid_argument("sample_arrivals_stick: m_max must be >= 1");
    std::vector<double> taus;
    taus.reserve(static_cast<std::size_t>(m_max));
    double remaining = 1.0; // prod_{k<=m} (1 - U_k)
    for (long long k = 1; k <= m_max; ++k) {
        BetaLaw wait{1.0, rhoB + static_cast<double>(k - 1)};
        remaining *= 1.0 - wait.sample(rng);
        taus.push_back(1.0 - remaining);
    }
    return taus;
}

double generator_apply(const CountFunctional& f, const PointConfiguration& nu, double s) {
    if (!(s < 1.0)) throw std::invalid_argument("generator_apply: s must be < 1");
    const long long n = count(nu, f.window);
    return (f.window.mass + static_cast<double>(n)) / (1.0 - s) * (f.phi(n + 1) - f.phi(n));
}

KolmogorovCheck kolmogorov_residual(const CountFunctional& f, double t, double h,
                                    long long n_samples, std::uint64_t master_seed,
                                    unsigned threads) {
    if (!(t - h > 0.0 && t + h < 1.0))
        throw std::invalid_argument("kolmogorov_residual: need 0 < t-h and t+h < 1");
    const double rho = f.window.mass;

    // Common random numbers: one Gamma(rho,1) level and one uniform quantile
    // per replicate drive the counts at t-h, t, and t+h through the Poisson
    // inverse cdf, so the three counts move together and the paired
    // finite-difference variance stays small.
    struct Draw {
        double diff = 0.0; // (phi(N_{t+h}) - phi(N_{t-h})) / (2h)
        double gen = 0.0;  // generator term at t
    };
    auto one = [&](long long i) {
        RngStream rng(master_seed, static_cast<std::uint64_t>(i));
        const double level = sample_gamma(rng, rho, 1.0);
        const double u = rng.uniform();
        auto count_at = [&](double x) { return poisson_icdf(level * x / (1.0 - x), u); };
        const long long n_lo = count_at(t - h);
        const long long n_mid = count_at(t);
        const long long n_hi = count_at(t + h);
        Draw d;
        d.diff = (f.phi(n_hi) - f.phi(n_lo)) / (2.0 * h);
        d.gen = (rho + static_cast<double>(n_mid)) / (1.0 - t) * (f.phi(n_mid + 1) - f.phi(n_mid));
        return d;
    };
    const auto draws = run_replicates(n_samples, threads, one);

    double sum_diff = 0.0, sum_diff2 = 0.0, sum_gen = 0.0, sum_gen2 = 0.0;
    double sum_resid = 0.0, sum_resid2 = 0.0;
    for (const auto& d : draws) {
        sum_diff += d.diff;
        sum_diff2 += d.diff * d.diff;
        sum_gen += d.gen;
        sum_gen2 += d.gen * d.gen;
        const double r = d.diff - d.gen;
        sum_resid += r;
        sum_resid2 += r * r;
    }
    const double n = static_cast<double>(n_samples);
    KolmogorovCheck out;
    out.lhs = sum_diff / n;
    out.rhs = sum_gen / n;
    const double mean_resid = sum_resid / n;
    const double var_resid = std::max(0.0, sum_resid2 / n - mean_resid * mean_resid);
    out.mc_se = std::sqrt(var_resid / n);
    out.se_lhs = std::sqrt(std::max(0.0, sum_diff2 / n - out.lhs * out.lhs) / n);
    out.se_rhs = std::sqrt(std::max(0.0, sum_gen2 / n - out.rhs * out.rhs) / n);
    return out;
}

double time_change(double u) {
    if (!(u >= 0.0)) throw std::invalid_argument("time_change: u must be >= 0");
    return u / (1.0 + u);
}

double time_change_inverse(double t) {
    if (!(t >= 0.0 && t < 1.0)) throw std::invalid_argument("time_change_inverse: t in [0,1)");
    return t / (1.0 - t);
}

} // namespace polyasim
