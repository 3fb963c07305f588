#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "polyasim/measure.hpp"
#include "polyasim/rng.hpp"

namespace polyasim {

// An ordered pair of times 0 <= s <= t < 1 on the process's native clock.
struct TimePair {
    double s = 0.0;
    double t = 0.0;
    TimePair(double s_, double t_);
};

// A bounded functional of the count in one window: phi applied to nu(B).
struct CountFunctional {
    Window window;
    std::function<double(long long)> phi;
    double bound = 0.0;
};

// Builds the capped-count functional phi(n) = min(n, cap).
CountFunctional make_capped_count(Window window, long long cap);

// One forward transition s -> t in a single window: an increment drawn from
// the urn sampler at activity (t-s)/(1-s) boosted by the current state, then
// superposed onto it. Atoms outside the window pass through untouched.
PointConfiguration forward_step(const PointConfiguration& nu, TimePair tp, const BaseMeasure& base,
                                const std::string& window_id, RngStream& rng);

// Samples the process on a strictly increasing grid in [0,1), starting from
// the empty state at time 0 and applying forward steps across every window of
// the base measure. The result is monotone: later states dominate earlier.
Trajectory sample_path(const std::vector<double>& grid, const BaseMeasure& base, RngStream& rng);

// One backward transition t -> s: independent thinning with retention
// s(1-t) / (t(1-s)); the identity when s == t.
PointConfiguration backward_step(const PointConfiguration& nu, TimePair tp, RngStream& rng);

// Closed-form arrival-time laws for the (m+1)-th arrival in a window of mass
// rhoB: survival(t) = P(at most m arrivals by t), density(t) of the (m+1)-th
// arrival (a Beta(m+1, rhoB) law), and the joint density of the m-th and
// (m+1)-th arrival times on the triangle 0 <= s <= t <= 1 (m >= 1 only).
struct ArrivalLaw {
    long long m = 0;
    double rhoB = 0.0;

    ArrivalLaw(long long m_, double rhoB_);
    double survival(double t) const;
    double density(double t) const;
    double joint_density(double s, double t) const;
};

// Stick-breaking arrival sampler: U_k ~ Beta(1, rhoB + k - 1) and
// tau_m = 1 - prod_{k<=m} (1 - U_k); strictly increasing, all in (0,1), with
// tau_m marginally Beta(m, rhoB).
std::vector<double> sample_arrivals_stick(double rhoB, long long m_max, RngStream& rng);

// The process generator applied to a count functional: for phi of the count
// in window B the integral collapses to
// (rho(B) + nu(B)) / (1-s) * [phi(nu(B)+1) - phi(nu(B))].
double generator_apply(const CountFunctional& f, const PointConfiguration& nu, double s);

// Monte Carlo check of the Kolmogorov forward equation at time t: `lhs` is a
// central finite difference (step h) of E[phi(Y_t)], `rhs` is E[A_t phi(Y_t)],
// and `mc_se` is the standard error of lhs - rhs from paired replicates that
// share common random numbers across t-h, t, t+h.
struct KolmogorovCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double mc_se = 0.0;  // standard error of lhs - rhs (paired)
    double se_lhs = 0.0; // standard error of lhs alone
    double se_rhs = 0.0; // standard error of rhs alone
};

KolmogorovCheck kolmogorov_residual(const CountFunctional& f, double t, double h,
                                    long long n_samples, std::uint64_t master_seed,
                                    unsigned threads = 1);

// The clock mapping u >= 0 to t = u/(1+u) in [0,1), and its inverse; the
// reparametrized process has intensity measure u * rho at clock value u.
double time_change(double u);
double time_change_inverse(double t);

} // namespace polyasim
