#include "doctest.h"

#include <cmath>
#include <vector>

#include "polyasim/hydro.hpp"
#include "polyasim/rng.hpp"
#include "polyasim/special.hpp"
#include "polyasim/stats.hpp"

using namespace polyasim;

TEST_CASE("scaled profile") {
    MultiplicityProfile eta;
    CHECK(scaled_profile(eta, 10.0).values().empty());
    eta.set(1, 3);
    eta.set(4, 2);
    SignedProfile v = scaled_profile(eta, 10.0);
    CHECK(v.at(1) == doctest::Approx(0.3));
    CHECK(v.at(4) == doctest::Approx(0.2));
    CHECK(v.at(2) == 0.0);
}

TEST_CASE("transport rhs at the analytic solution") {
    // At V = tau_t the flow reduces to dV(j)/dt = t^{j-1}.
    for (double t : {0.2, 0.4, 0.7}) {
        HydroState state;
        state.t = t;
        state.V = tau_profile(t, 12);
        auto rhs = hydro_rhs(state);
        REQUIRE(rhs.size() == 12);
        for (std::size_t k = 0; k < rhs.size(); ++k) {
            CHECK(rhs[k] == doctest::Approx(std::pow(t, static_cast<double>(k))).epsilon(1e-11));
        }
    }
    // From the zero state at t = 0 only site 1 is fed.
    HydroState zero;
    zero.t = 0.0;
    zero.V.assign(5, 0.0);
    auto rhs0 = hydro_rhs(zero);
    CHECK(rhs0[0] == doctest::Approx(1.0));
    for (std::size_t k = 1; k < rhs0.size(); ++k) CHECK(rhs0[k] == doctest::Approx(0.0));
}

TEST_CASE("integrator hits the analytic solution") {
    HydroState end = hydro_integrate(0.5, 10, 1e-3);
    CHECK(end.t == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(end.V[0] == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(end.V[1] == doctest::Approx(0.125).epsilon(1e-8));
    CHECK(end.V[2] == doctest::Approx(1.0 / 24.0).epsilon(1e-8));

    HydroState far = hydro_integrate(0.9, 60, 1e-4);
    auto exact = tau_profile(0.9, 60);
    double err = 0.0;
    for (std::size_t k = 0; k < exact.size(); ++k)
        err = std::max(err, std::abs(far.V[k] - exact[k]));
    CHECK(err < 1e-8);
    CHECK(far.tail_indicator() < 1.0); // truncation window wide enough at j_max=60
}

TEST_CASE("integrator converges at fourth order") {
    auto max_err = [](double step) {
        HydroState end = hydro_integrate(0.9, 40, step);
        auto exact = tau_profile(0.9, 40);
        double err = 0.0;
        for (std::size_t k = 0; k < exact.size(); ++k)
            err = std::max(err, std::abs(end.V[k] - exact[k]));
        return err;
    };
    // Halving the step should divide the error by about 16.
    double coarse = max_err(0.018);
    double fine = max_err(0.009);
    CHECK(coarse / fine > 10.0);
    CHECK(coarse / fine < 22.0);
}

TEST_CASE("analytic profile basics") {
    auto tau = tau_profile(0.5, 6);
    REQUIRE(tau.size() == 6);
    CHECK(tau[0] == doctest::Approx(0.5));
    CHECK(tau[1] == doctest::Approx(0.125));
    CHECK(tau[5] == doctest::Approx(std::pow(0.5, 6) / 6.0));
}

TEST_CASE("limit generator on linear functionals") {
    // For f(eta) = eta(g) the generator is
    // [g(1) + sum_j j eta(j) (g(j+1) - g(j))]/(1-s).
    std::vector<double> g{2.0, 1.0, 0.5, 0.25};
    auto eval = [g](const SignedProfile& xi) { return xi.pair_with(g); };
    auto grad = [g](const SignedProfile&, long long j) {
        return j >= 1 && static_cast<std::size_t>(j) <= g.size()
                   ? g[static_cast<std::size_t>(j - 1)]
                   : 0.0;
    };
    DifferentiableFunctional f(eval, grad, 100.0);

    SignedProfile eta;
    eta.set(1, 0.5);
    eta.set(3, 0.2);
    double s = 0.25;
    double expected = (g[0] + 1.0 * 0.5 * (g[1] - g[0]) + 3.0 * 0.2 * (g[3] - g[2])) / (1.0 - s);
    CHECK(limit_generator_apply(f, eta, s) == doctest::Approx(expected).epsilon(1e-12));

    // Constants are killed.
    auto c_eval = [](const SignedProfile&) { return 5.0; };
    auto c_grad = [](const SignedProfile&, long long) { return 0.0; };
    DifferentiableFunctional c(c_eval, c_grad, 5.0);
    CHECK(limit_generator_apply(c, eta, s) == doctest::Approx(0.0));
}

TEST_CASE("analytic profile is a fixed point of the limit flow") {
    // d/ds f(tau_s) for linear f(eta) = eta(g) equals the generator applied
    // at tau_s: sum_j s^{j-1} g(j).
    std::vector<double> g{1.0, -2.0, 0.7, 0.3};
    auto eval = [g](const SignedProfile& xi) { return xi.pair_with(g); };
    auto grad = [g](const SignedProfile&, long long j) {
        return j >= 1 && static_cast<std::size_t>(j) <= g.size()
                   ? g[static_cast<std::size_t>(j - 1)]
                   : 0.0;
    };
    DifferentiableFunctional f(eval, grad, 100.0);
    for (double s : {0.2, 0.5, 0.8}) {
        SignedProfile tau;
        auto vals = tau_profile(s, 30);
        for (std::size_t k = 0; k < vals.size(); ++k)
            tau.set(static_cast<long long>(k) + 1, vals[k]);
        double expected = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k)
            expected += std::pow(s, static_cast<double>(k)) * g[k];
        CHECK(limit_generator_apply(f, tau, s) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("fluctuation samples have the right moments") {
    RngStream rng(1000, 0);
    const int n = 20000;
    const double t = 0.5;
    const double rhoB = 100.0;
    std::vector<double> z1(n), z2(n);
    for (int i = 0; i < n; ++i) {
        SignedProfile z = fluct_sample(rhoB, t, rng);
        z1[i] = z.at(1);
        z2[i] = z.at(2);
    }
    // Var Z(j) = t^j/j exactly, at every rhoB.
    CHECK(moment_check("fluct-z1", z1, 0.0, 0.5).passed);
    CHECK(moment_check("fluct-z2", z2, 0.0, 0.125).passed);
    CHECK(independence_test("fluct-z1-z2", z1, z2).passed);
}

TEST_CASE("limit field moments and independence") {
    RngStream rng(1001, 0);
    const int n = 20000;
    const double t = 0.5;
    std::vector<double> z1(n), z2(n);
    for (int i = 0; i < n; ++i) {
        SignedProfile z = fluct_limit_sample(t, 12, rng);
        z1[i] = z.at(1);
        z2[i] = z.at(2);
    }
    CHECK(moment_check("limit-z1", z1, 0.0, 0.5).passed);
    CHECK(moment_check("limit-z2", z2, 0.0, 0.125).passed);
    CHECK(independence_test("limit-z1-z2", z1, z2).passed);

    // The limit field is exactly Gaussian per site.
    auto cdf = [](double x) { return normal_cdf(x / std::sqrt(0.5)); };
    CHECK(ks_test("limit-z1-ks", z1, cdf).passed);
}

TEST_CASE("limit fluctuation generator closed form at the origin") {
    // For the exponential functional with g = delta_1 at xi = 0, s = 1/2:
    // only the first diffusion sum contributes: (1/2)(1+s)/(1-s) * g(1)^2 = 3/2.
    TestFunction g{{1.0}};
    DifferentiableFunctional f = make_exp_functional(g);
    SignedProfile zero;
    CHECK(limit_fluct_generator_apply(f, zero, 0.5) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(limit_fluct_generator_apply(f, zero, 0.5, true) == doctest::Approx(1.5).epsilon(1e-12));

    // With support on two sites the cross term enters:
    // (1/2)(1+s)/(1-s)(g1^2 + s g2^2) - s/(1-s) g1 g2.
    TestFunction g2{{1.0, 0.5}};
    DifferentiableFunctional f2 = make_exp_functional(g2);
    double s = 0.5;
    double expected = 0.5 * (1.0 + s) / (1.0 - s) * (1.0 + s * 0.25) - s / (1.0 - s) * 0.5;
    CHECK(limit_fluct_generator_apply(f2, zero, s) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("drift forms agree on random states") {
    TestFunction g{{1.0, 0.5, 0.25, 0.1}};
    DifferentiableFunctional f = make_exp_functional(g);
    RngStream rng(1002, 0);
    for (int trial = 0; trial < 50; ++trial) {
        SignedProfile xi;
        for (long long j = 1; j <= 6; ++j)
            if (rng.uniform() < 0.7) xi.set(j, rng.uniform(-2.0, 2.0));
        for (double s : {0.2, 0.5, 0.8}) {
            double primary = limit_fluct_generator_apply(f, xi, s, false);
            double alternate = limit_fluct_generator_apply(f, xi, s, true);
            CHECK(primary == doctest::Approx(alternate).epsilon(1e-10));
        }
    }
}

TEST_CASE("exponential functional derivatives") {
    TestFunction g{{1.0, 0.5}};
    DifferentiableFunctional f = make_exp_functional(g);
    CHECK(f.has_hess());
    SignedProfile xi;
    xi.set(1, 0.3);
    xi.set(2, -0.4);
    double val = std::exp(0.3 * 1.0 - 0.4 * 0.5);
    CHECK(f(xi) == doctest::Approx(val).epsilon(1e-12));
    CHECK(f.grad(xi, 1) == doctest::Approx(val * 1.0).epsilon(1e-12));
    CHECK(f.grad(xi, 2) == doctest::Approx(val * 0.5).epsilon(1e-12));
    CHECK(f.grad(xi, 5) == doctest::Approx(0.0));
    CHECK(f.hess(xi, 1, 2) == doctest::Approx(val * 0.5).epsilon(1e-12));
    CHECK(f.hess(xi, 2, 2) == doctest::Approx(val * 0.25).epsilon(1e-12));
}

TEST_CASE("mgf check analytic fields") {
    // g = delta_1 at s = 1/2: log-MGF = (1/2)(s^1/1) g^2 = 1/4 and
    // d/ds log-MGF = 1/2.
    TestFunction g{{1.0}};
    MgfCheck mc = mgf_check(g, 0.5, 100.0, 4000, 1100);
    CHECK(mc.analytic == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(mc.analytic_dds == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mc.se_limit > 0.0);
    CHECK(mc.se_prelimit > 0.0);
    CHECK(std::abs(mc.empirical_limit - mc.analytic) < 5.0 * mc.se_limit);
    // The generator ratio targets the derivative.
    CHECK(std::abs(mc.generator_over_mgf - mc.analytic_dds) <
          5.0 * mc.se_generator_over_mgf + 0.02);
}

TEST_CASE("mgf prelimit gap shrinks with rhoB") {
    TestFunction g{{1.0, 0.5, 0.25}};
    const long long n = 100000;
    MgfCheck lo = mgf_check(g, 0.5, 100.0, n, 1101);
    MgfCheck hi = mgf_check(g, 0.5, 10000.0, n, 1102);
    CHECK(lo.analytic == hi.analytic);
    // The skew correction scales like 1/sqrt(rhoB): about 8.6e-3 at rhoB=100,
    // 8.6e-4 at rhoB=1e4; allow full Monte Carlo slack on top.
    CHECK(std::abs(lo.empirical_prelimit - lo.analytic) < 0.0086 + 4.0 * lo.se_prelimit);
    CHECK(std::abs(hi.empirical_prelimit - hi.analytic) < 0.00086 + 4.0 * hi.se_prelimit);
}

TEST_CASE("mgf check is thread-count invariant") {
    TestFunction g{{1.0, 0.5}};
    MgfCheck a = mgf_check(g, 0.5, 500.0, 4000, 1103, 1);
    MgfCheck b = mgf_check(g, 0.5, 500.0, 4000, 1103, 4);
    CHECK(a.empirical_limit == b.empirical_limit);
    CHECK(a.empirical_prelimit == b.empirical_prelimit);
    CHECK(a.generator_over_mgf == b.generator_over_mgf);
}
