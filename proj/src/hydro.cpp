#include "polyasim/hydro.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "polyasim/parallel.hpp"

namespace polyasim {

SignedProfile scaled_profile(const MultiplicityProfile& eta, double rhoB) {
    if (!(rhoB > 0.0)) throw std::invalid_argument("scaled_profile: rhoB must be > 0");
    SignedProfile out;
    for (const auto& [j, c] : eta.counts()) out.set(j, static_cast<double>(c) / rhoB);
    return out;
}

std::vector<double> hydro_rhs(const HydroState& state) {
    if (!(state.t < 1.0)) throw std::invalid_argument("hydro_rhs: t must be < 1");
    const double inv = 1.0 / (1.0 - state.t);
    std::vector<double> rhs(state.V.size());
    for (std::size_t k = 0; k < state.V.size(); ++k) {
        const double inflow = k == 0 ? 1.0 : static_cast<double>(k) * state.V[k - 1];
        rhs[k] = (inflow - static_cast<double>(k + 1) * state.V[k]) * inv;
    }
    return rhs;
}

HydroState hydro_integrate(double t_end, long long j_max, double step) {
    if (!(t_end > 0.0 && t_end < 1.0))
        throw std::invalid_argument("hydro_integrate: t_end must lie in (0,1)");
    if (j_max < 1) throw std::invalid_argument("hydro_integrate: j_max must be >= 1");
    if (!(step > 0.0)) throw std::invalid_argument("hydro_integrate: step must be > 0");

    HydroState state;
    state.t = 0.0;
    state.V.assign(static_cast<std::size_t>(j_max), 0.0);

    auto deriv = [&](double t, const std::vector<double>& v) {
        HydroState tmp;
        tmp.t = t;
        tmp.V = v;
        return hydro_rhs(tmp);
    };
    auto shifted = [](const std::vector<double>& v, const std::vector<double>& k, double h) {
        std::vector<double> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] + h * k[i];
        return out;
    };

    while (state.t < t_end) {
        const double h = std::min(step, t_end - state.t);
        if (h < step * 1e-12) break;
        const auto k1 = deriv(state.t, state.V);
        const auto k2 = deriv(state.t + h / 2.0, shifted(state.V, k1, h / 2.0));
        const auto k3 = deriv(state.t + h / 2.0, shifted(state.V, k2, h / 2.0));
        const auto k4 = deriv(state.t + h, shifted(state.V, k3, h));
        for (std::size_t i = 0; i < state.V.size(); ++i)
            state.V[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        state.t += h;
        for (std::size_t i = 0; i < state.V.size(); ++i) {
            if (std::isnan(state.V[i]) || state.V[i] < -1e-12)
                throw std::runtime_error("hydro_integrate: instability at t=" +
                                         std::to_string(state.t) + ", j=" + std::to_string(i + 1) +
                                         ", V=" + std::to_string(state.V[i]));
        }
    }
    state.t = t_end;
    return state;
}

std::vector<double> tau_profile(double t, long long j_max) {
    std::vector<double> out(static_cast<std::size_t>(j_max));
    double power = t;
    for (long long j = 1; j <= j_max; ++j) {
        out[static_cast<std::size_t>(j - 1)] = power / static_cast<double>(j);
        power *= t;
    }
    return out;
}

double limit_generator_apply(const DifferentiableFunctional& f, const SignedProfile& eta,
                             double s) {
    if (!(s < 1.0)) throw std::invalid_argument("limit_generator_apply: s must be < 1");
    double acc = f.grad(eta, 1);
    for (const auto& [j, v] : eta.values())
        acc += static_cast<double>(j) * v * (f.grad(eta, j + 1) - f.grad(eta, j));
    return acc / (1.0 - s);
}

SignedProfile fluct_sample(double rhoB, double t, RngStream& rng) {
    if (!(rhoB > 0.0)) throw std::invalid_argument("fluct_sample: rhoB must be > 0");
    const std::vector<double> lambda = marginal_profile_law(rhoB, t);
    const double scale = 1.0 / std::sqrt(rhoB);
    SignedProfile z;
    for (std::size_t k = 0; k < lambda.size(); ++k) {
        const long long c = sample_poisson(rng, lambda[k]);
        z.set(static_cast<long long>(k) + 1, (static_cast<double>(c) - lambda[k]) * scale);
    }
    return z;
}

SignedProfile fluct_limit_sample(double t, long long j_max, RngStream& rng) {
    if (!(t > 0.0 && t < 1.0))
        throw std::invalid_argument("fluct_limit_sample: t must lie in (0,1)");
    SignedProfile z;
    double power = t;
    for (long long j = 1; j <= j_max; ++j) {
        z.set(j, sample_normal(rng) * std::sqrt(power / static_cast<double>(j)));
        power *= t;
    }
    return z;
}

double limit_fluct_generator_apply(const DifferentiableFunctional& f, const SignedProfile& xi,
                                   double s, bool alternate_drift) {
    if (!(s >= 0.0 && s < 1.0))
        throw std::invalid_argument("limit_fluct_generator_apply: s must lie in [0,1)");
    const double inv = 1.0 / (1.0 - s);
    const double scale = std::max(1.0, f.bound());

    // Quadratic terms, truncated once the geometric weight is negligible.
    double acc = 0.0;
    double s_jm1 = 1.0; // s^{j-1}
    for (long long j = 1; j <= 1 << 20; ++j) {
        acc += 0.5 * (1.0 + s) * inv * s_jm1 * f.hess(xi, j, j);
        acc -= inv * s_jm1 * s * f.hess(xi, j, j + 1);
        s_jm1 *= s;
        if (s_jm1 * scale < 1e-14) break;
    }

    // Drift term, in either of its two algebraically equal arrangements.
    if (!alternate_drift) {
        for (const auto& [j, v] : xi.values())
            acc += inv * static_cast<double>(j) * v * (f.grad(xi, j + 1) - f.grad(xi, j));
    } else {
        const long long j_hi = xi.max_support() + 1;
        for (long long j = 1; j <= j_hi; ++j) {
            const double w = static_cast<double>(j - 1) * xi.at(j - 1) -
                             static_cast<double>(j) * xi.at(j);
            if (w != 0.0) acc += inv * w * f.grad(xi, j);
        }
    }
    return acc;
}

DifferentiableFunctional make_exp_functional(const TestFunction& g) {
    auto value = [g](const SignedProfile& xi) { return std::exp(xi.pair_with(g.g)); };
    auto grad = [g, value](const SignedProfile& xi, long long j) { return value(xi) * g.at(j); };
    auto hess = [g, value](const SignedProfile& xi, long long j, long long k) {
        return value(xi) * g.at(j) * g.at(k);
    };
    double sum_abs = 0.0;
    for (double v : g.g) sum_abs += std::abs(v);
    return DifferentiableFunctional{value, grad, hess, std::exp(sum_abs)};
}

MgfCheck mgf_check(const TestFunction& g, double s, double rhoB, long long n_samples,
                   std::uint64_t master_seed, unsigned threads) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("mgf_check: s must lie in (0,1)");
    for (double v : g.g)
        if (std::abs(v) > 4.0)
            throw std::invalid_argument("mgf_check: |g| must be <= 4 to keep exp moments tame");

    MgfCheck out;
    double power = s;
    for (std::size_t k = 0; k < g.g.size(); ++k) {
        const double gj = g.g[k];
        out.analytic += 0.5 * power / static_cast<double>(k + 1) * gj * gj;
        out.analytic_dds += 0.5 * (power / s) * gj * gj;
        power *= s;
    }

    const DifferentiableFunctional f = make_exp_functional(g);
    const long long j_max = static_cast<long long>(g.g.size());

    struct Draw {
        double m_limit = 0.0;    // exp(Z(g)) under the limit field
        double gen = 0.0;        // C_s f at the same draw
        double m_prelimit = 0.0; // exp(Z_B(g)) at finite rhoB
    };
    auto one = [&](long long i) {
        RngStream rng(master_seed, static_cast<std::uint64_t>(i));
        Draw d;
        const SignedProfile z = fluct_limit_sample(s, j_max, rng);
        d.m_limit = std::exp(z.pair_with(g.g));
        d.gen = limit_fluct_generator_apply(f, z, s);
        const SignedProfile zb = fluct_sample(rhoB, s, rng);
        d.m_prelimit = std::exp(zb.pair_with(g.g));
        return d;
    };
    const auto draws = run_replicates(n_samples, threads, one);

    const double n = static_cast<double>(n_samples);
    double sum_m = 0.0, sum_m2 = 0.0, sum_g = 0.0, sum_g2 = 0.0, sum_gm = 0.0;
    double sum_p = 0.0, sum_p2 = 0.0;
    for (const auto& d : draws) {
        sum_m += d.m_limit;
        sum_m2 += d.m_limit * d.m_limit;
        sum_g += d.gen;
        sum_g2 += d.gen * d.gen;
        sum_gm += d.gen * d.m_limit;
        sum_p += d.m_prelimit;
        sum_p2 += d.m_prelimit * d.m_prelimit;
    }
    const double mean_m = sum_m / n;
    const double var_m = std::max(0.0, sum_m2 / n - mean_m * mean_m);
    const double mean_g = sum_g / n;
    const double var_g = std::max(0.0, sum_g2 / n - mean_g * mean_g);
    const double cov_gm = sum_gm / n - mean_g * mean_m;
    const double mean_p = sum_p / n;
    const double var_p = std::max(0.0, sum_p2 / n - mean_p * mean_p);

    out.empirical_limit = std::log(mean_m);
    out.se_limit = std::sqrt(var_m / n) / mean_m;
    out.empirical_prelimit = std::log(mean_p);
    out.se_prelimit = std::sqrt(var_p / n) / mean_p;
    out.generator_over_mgf = mean_g / mean_m;
    const double r = out.generator_over_mgf;
    out.se_generator_over_mgf =
        std::sqrt(std::max(0.0, var_g - 2.0 * r * cov_gm + r * r * var_m) / n) / mean_m;
    return out;
}

} // namespace polyasim
