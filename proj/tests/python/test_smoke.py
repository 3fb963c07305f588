import math

import polyasim


def test_sample_counts_moments_and_determinism():
    a = polyasim.sample_counts(rho=2.0, z=0.5, reps=4000, seed=42)
    b = polyasim.sample_counts(rho=2.0, z=0.5, reps=4000, seed=42)
    c = polyasim.sample_counts(rho=2.0, z=0.5, reps=4000, seed=43)
    assert a == b
    assert a != c
    mean = sum(a) / len(a)
    # NB(2, 1/2): mean 2, variance 4; 3 standard errors at n=4000 is ~0.095.
    assert abs(mean - 2.0) < 0.15
    assert all(x >= 0 for x in a)


def test_path_counts_are_monotone():
    paths = polyasim.sample_path_counts(rho=1.0, grid=[0.2, 0.4, 0.6], reps=200, seed=7)
    assert len(paths) == 200
    for row in paths:
        assert len(row) == 3
        assert row[0] <= row[1] <= row[2]


def test_arrival_times_increase():
    arrs = polyasim.arrival_times(rho=1.5, m_max=5, reps=300, seed=11)
    for row in arrs:
        assert len(row) == 5
        assert all(0.0 < x < 1.0 for x in row)
        assert all(x < y for x, y in zip(row, row[1:]))
    # tau_1 ~ Beta(1, 1.5): mean 1/(1+1.5) = 0.4.
    mean1 = sum(row[0] for row in arrs) / len(arrs)
    assert abs(mean1 - 0.4) < 0.05


def test_crp_seatings_match_enumeration_support():
    law = polyasim.enumerate_seatings(theta=1.0, n=3)
    assert abs(sum(law.values()) - 1.0) < 1e-12
    assert abs(law["1,1,1"] - 1.0 / 3.0) < 1e-12
    seatings = polyasim.crp_seatings(theta=1.0, n=3, reps=500, seed=5)
    assert all(s in law for s in seatings)
    assert abs(polyasim.expected_tables(1.0, 3) - 11.0 / 6.0) < 1e-12


def test_profile_counts_and_marginal_law():
    lam = polyasim.marginal_profile_law(rho=2.0, t=0.5)
    assert abs(lam[0] - 1.0) < 1e-12
    assert abs(sum(lam) - 2.0 * math.log(2.0)) < 1e-9
    profiles = polyasim.profile_counts(rho=2.0, t=0.5, reps=2000, seed=3)
    mean_stacks = sum(sum(p.values()) for p in profiles) / len(profiles)
    assert abs(mean_stacks - 2.0 * math.log(2.0)) < 0.1


def test_hydro_curve_accuracy():
    out = polyasim.hydro_curve(t_end=0.5, j_max=20, step=1e-3)
    assert out["max_abs_err"] < 1e-8
    assert abs(out["V"][0] - 0.5) < 1e-8
    assert abs(out["analytic"][1] - 0.125) < 1e-12


def test_fluct_and_mgf():
    zs = polyasim.fluct_samples(rho=10000.0, t=0.5, j_max=3, reps=2000, seed=9)
    m1 = sum(z[0] for z in zs) / len(zs)
    v1 = sum(z[0] ** 2 for z in zs) / len(zs) - m1**2
    assert abs(m1) < 0.06  # Var Z(1) = 0.5, so 3 SE ~ 0.047
    assert abs(v1 - 0.5) < 0.1

    rep = polyasim.mgf_report(g=[1.0], s=0.5, rho=100.0, n_samples=3000, seed=12)
    assert abs(rep["analytic"] - 0.25) < 1e-12
    assert abs(rep["analytic_dds"] - 0.5) < 1e-12
    assert abs(rep["empirical_limit"] - 0.25) < 6.0 * rep["se_limit"]


def test_kolmogorov_report():
    rep = polyasim.kolmogorov_report(rho=1.0, t=0.5, h=0.01, n_samples=20000, seed=4)
    assert rep["mc_se"] > 0.0
    assert abs(rep["lhs"] - rep["rhs"]) < 4.0 * rep["mc_se"]
