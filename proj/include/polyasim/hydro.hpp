#pragma once

#include <cstdint>
#include <vector>

#include "polyasim/measure.hpp"
#include "polyasim/mprw.hpp"
#include "polyasim/rng.hpp"

namespace polyasim {

// Truncated renormalized profile: V[k] approximates the mass at site j = k+1.
struct HydroState {
    double t = 0.0;
    std::vector<double> V;

    long long j_max() const { return static_cast<long long>(V.size()); }
    // Mass leaving the truncation window per unit time, scaled by (1-t).
    double tail_indicator() const { return V.empty() ? 0.0 : static_cast<double>(V.size()) * V.back(); }
};

// A finitely supported test function on sites: g[k] is the value at j = k+1.
struct TestFunction {
    std::vector<double> g;

    double at(long long j) const {
        return j >= 1 && static_cast<std::size_t>(j) <= g.size() ? g[static_cast<std::size_t>(j - 1)] : 0.0;
    }
};

// The renormalization eta / rhoB as a signed profile.
SignedProfile scaled_profile(const MultiplicityProfile& eta, double rhoB);

// Transport right-hand side: dV(1)/dt = [1 - V(1)]/(1-t) and
// dV(j)/dt = [(j-1) V(j-1) - j V(j)]/(1-t) for j >= 2.
std::vector<double> hydro_rhs(const HydroState& state);

// Classical fourth-order Runge-Kutta from V(0) = 0 to t_end with fixed step
// (a shorter final step lands exactly on t_end). Aborts on NaN or on values
// below -1e-12.
HydroState hydro_integrate(double t_end, long long j_max, double step);

// The analytic solution t^j/j for j = 1..j_max.
std::vector<double> tau_profile(double t, long long j_max);

// Hydrodynamic limit generator on once-differentiable functionals:
// (1/(1-s)) [ f'(eta)[delta_1] + sum_j j eta(j) (f'(eta)[delta_{j+1}] - f'(eta)[delta_j]) ].
double limit_generator_apply(const DifferentiableFunctional& f, const SignedProfile& eta,
                             double s);

// Centered-and-scaled profile draw at finite rhoB: per-site counts are
// independent Poisson(rhoB t^j/j), and Z(j) = (count_j - rhoB t^j/j)/sqrt(rhoB)
// on the truncation range of marginal_profile_law.
SignedProfile fluct_sample(double rhoB, double t, RngStream& rng);

// The limiting field: independent centered Gaussians with Var Z(j) = t^j/j.
SignedProfile fluct_limit_sample(double t, long long j_max, RngStream& rng);

// Limit fluctuation generator (requires a Hessian):
//   (1/2)(1+s)/(1-s) sum_j s^{j-1} f''[delta_j,delta_j]
//   - (1/(1-s)) sum_j s^j f''[delta_j,delta_{j+1}]
//   + (1/(1-s)) sum_j j xi(j) (f'[delta_{j+1}] - f'[delta_j]).
// With alternate_drift the last sum is evaluated in its summation-by-parts
// rearrangement sum_j [(j-1) xi(j-1) - j xi(j)] f'[delta_j] (xi(0) = 0); the
// two forms agree to floating-point accuracy.
double limit_fluct_generator_apply(const DifferentiableFunctional& f, const SignedProfile& xi,
                                   double s, bool alternate_drift = false);

// The exponential functional f(xi) = exp(xi(g)) with analytic Gateaux
// derivatives f' = f g and f'' = f g (x) g.
DifferentiableFunctional make_exp_functional(const TestFunction& g);

// Moment-generating-function comparison for Z_s(g): the analytic log-MGF
// (1/2) sum_j (s^j/j) g(j)^2, Monte Carlo log-MGFs under the limiting field
// and under the finite-rhoB field, the derivative identity
// d/ds log-MGF = (1/2) sum_j s^{j-1} g(j)^2, and the Monte Carlo value of
// E[C_s f(Z_s)] / E[f(Z_s)] that should match it.
struct MgfCheck {
    double analytic = 0.0;
    double empirical_limit = 0.0;
    double se_limit = 0.0;
    double empirical_prelimit = 0.0;
    double se_prelimit = 0.0;
    double analytic_dds = 0.0;
    double generator_over_mgf = 0.0;
    double se_generator_over_mgf = 0.0;
};

MgfCheck mgf_check(const TestFunction& g, double s, double rhoB, long long n_samples,
                   std::uint64_t master_seed, unsigned threads = 1);

} // namespace polyasim
