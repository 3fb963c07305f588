#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "polyasim/dist.hpp"
#include "polyasim/measure.hpp"
#include "polyasim/rng.hpp"

namespace polyasim {

// One jump of the multiplicity walk: a birth creates a fresh site-1 stack, a
// hop moves one stack from site j to j+1. Times are recorded on both clocks
// (u = -log(1-s) and the native s).
struct ProfileEvent {
    enum class Kind { birth, hop };
    double u_time = 0.0;
    double s_time = 0.0;
    Kind kind = Kind::birth;
    long long j = 1; // site affected: 1 for births, the source site for hops
};

// Event skeleton of one simulated path, starting from the empty profile.
struct ProfileTrajectory {
    std::vector<ProfileEvent> events;
    double t_end = 0.0;

    // Profiles after each event (index k = state after events[k]); the state
    // before the first event is empty.
    std::vector<MultiplicityProfile> states() const;
    MultiplicityProfile terminal() const;

    // Verifies times strictly increase and every jump is +delta_1 or
    // -delta_j + delta_{j+1}; throws on violation.
    void validate() const;

    // Rows `u_time,s_time,event_kind,j` followed by terminal `j,count` rows.
    std::string to_csv() const;
};

// Exact event-driven simulation of the walk up to t_end. On the u-clock the
// birth rate is the constant rhoB and every size-j stack hops at constant
// rate j, so plain exponential-clock stepping simulates the chain with no
// discretization error; u is mapped back through s = 1 - e^{-u}.
ProfileTrajectory simulate_events(double rhoB, double t_end, RngStream& rng);

// Per-stack view of one simulated path, for conditional statistics: each
// stack records when it was born (u-clock) and its size at the marking time
// s_mark (0 if born later) and at t_end.
struct TrackedStack {
    double birth_u = 0.0;
    long long size_at_mark = 0;
    long long size_end = 0;
};

std::vector<TrackedStack> simulate_tracked(double rhoB, double s_mark, double t_end,
                                           RngStream& rng);

// Poisson means lambda_j = rhoB * t^j / j, truncated where the remaining tail
// mass drops below 1e-12 (the truncation point is the vector length).
std::vector<double> marginal_profile_law(double rhoB, double t);

// Generator of the walk applied to a bounded functional f of the profile:
// rhoB/(1-s) [f(eta+delta_1) - f(eta)]
//   + 1/(1-s) sum_j j eta(j) [f(eta-delta_j+delta_{j+1}) - f(eta)].
double profile_generator_apply(const std::function<double(const MultiplicityProfile&)>& f,
                               const MultiplicityProfile& eta, double s, double rhoB);

// A functional on signed profiles carrying analytic directional derivatives.
// grad(xi, j) is the derivative at xi in direction delta_j; hess(xi, j, k) is
// the second derivative in directions (delta_j, delta_k) and may be absent
// for first-order uses. Construction probes grad against finite differences
// of eval and rejects mismatches.
class DifferentiableFunctional {
  public:
    using Eval = std::function<double(const SignedProfile&)>;
    using Grad = std::function<double(const SignedProfile&, long long)>;
    using Hess = std::function<double(const SignedProfile&, long long, long long)>;

    DifferentiableFunctional(Eval eval, Grad grad, double bound);
    DifferentiableFunctional(Eval eval, Grad grad, Hess hess, double bound);

    double operator()(const SignedProfile& xi) const { return eval_(xi); }
    double grad(const SignedProfile& xi, long long j) const { return grad_(xi, j); }
    double hess(const SignedProfile& xi, long long j, long long k) const;
    bool has_hess() const { return static_cast<bool>(hess_); }
    double bound() const { return bound_; }

  private:
    void check_gradient() const;

    Eval eval_;
    Grad grad_;
    Hess hess_;
    double bound_ = 0.0;
};

// Generator of the centered walk U - rhoB * tau applied at xi:
// rhoB/(1-s) [f(xi+delta_1) - f(xi)]
//   - rhoB sum_j s^{j-1} grad(xi)[delta_j]
//   + 1/(1-s) sum_j (j xi(j) + rhoB s^j) [f(xi-delta_j+delta_{j+1}) - f(xi)],
// with the geometric series truncated once s^j max(1,bound) < 1e-14.
double centered_generator_apply(const DifferentiableFunctional& f, const SignedProfile& xi,
                                double s, double rhoB);

// Law of the displacement of a size-j stack between times s and t: negative
// binomial with shape j and activity (t-s)/(1-s).
NegativeBinomial particle_step_law(long long j, double s, double t);

} // namespace polyasim
