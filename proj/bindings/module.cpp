#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "polyasim/crp.hpp"
#include "polyasim/experiments.hpp"
#include "polyasim/hydro.hpp"
#include "polyasim/measure.hpp"
#include "polyasim/mprw.hpp"
#include "polyasim/polya.hpp"
#include "polyasim/scrp.hpp"
#include "polyasim/stats.hpp"

namespace py = pybind11;
using namespace polyasim;

namespace {

BaseMeasure one_window(double mass) { return BaseMeasure({Window{"B", mass}}); }

py::dict report_to_dict(const TestReport& r) {
    py::dict d;
    d["name"] = r.name;
    d["statistic"] = r.statistic;
    d["p_value"] = r.p_value;
    d["n"] = r.n;
    d["alpha"] = r.alpha;
    d["passed"] = r.passed;
    d["seed_info"] = r.seed_info;
    d["details"] = r.details;
    return d;
}

std::vector<long long> sample_counts(double rho, double z, long long reps, std::uint64_t seed) {
    BaseMeasure base = one_window(rho);
    PolyaParams params(z, base, "B");
    const Window& B = base.window("B");
    std::vector<long long> out(static_cast<std::size_t>(reps));
    for (long long i = 0; i < reps; ++i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        out[static_cast<std::size_t>(i)] = count(sample_urn(params, {}, rng), B);
    }
    return out;
}

std::vector<std::vector<long long>> sample_path_counts(double rho, std::vector<double> grid,
                                                       long long reps, std::uint64_t seed) {
    BaseMeasure base = one_window(rho);
    const Window& B = base.window("B");
    std::vector<std::vector<long long>> out(static_cast<std::size_t>(reps));
    for (long long i = 0; i < reps; ++i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        Trajectory traj = sample_path(grid, base, rng);
        std::vector<long long> counts;
        counts.reserve(traj.states.size());
        for (const auto& state : traj.states) counts.push_back(count(state, B));
        out[static_cast<std::size_t>(i)] = std::move(counts);
    }
    return out;
}

std::vector<std::vector<double>> arrival_times(double rho, long long m_max, long long reps,
                                               std::uint64_t seed) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(reps));
    for (long long i = 0; i < reps; ++i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        out[static_cast<std::size_t>(i)] = sample_arrivals_stick(rho, m_max, rng);
    }
    return out;
}

std::vector<std::string> crp_seatings(double theta, long long n, long long reps,
                                      std::uint64_t seed) {
    BaseMeasure base = one_window(theta);
    std::vector<std::string> out(static_cast<std::size_t>(reps));
    for (long long i = 0; i < reps; ++i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        out[static_cast<std::size_t>(i)] =
            extract_seating(simulate_arrival_events(base, "B", n, rng)).encode();
    }
    return out;
}

std::vector<std::map<long long, long long>> profile_counts(double rho, double t, long long reps,
                                                           std::uint64_t seed) {
    std::vector<std::map<long long, long long>> out(static_cast<std::size_t>(reps));
    for (long long i = 0; i < reps; ++i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        out[static_cast<std::size_t>(i)] = simulate_events(rho, t, rng).terminal().counts();
    }
    return out;
}

py::dict hydro_curve(double t_end, long long j_max, double step) {
    HydroState end = hydro_integrate(t_end, j_max, step);
    std::vector<double> analytic = tau_profile(t_end, j_max);
    double err = 0.0;
    for (std::size_t k = 0; k < analytic.size(); ++k)
        err = std::max(err, std::abs(end.V[k] - analytic[k]));
    py::dict d;
    d["t"] = end.t;
    d["V"] = end.V;
    d["analytic"] = analytic;
    d["max_abs_err"] = err;
    d["tail_indicator"] = end.tail_indicator();
    return d;
}

std::vector<std::vector<double>> fluct_samples(double rho, double t, long long j_max,
                                               long long reps, std::uint64_t seed) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(reps));
    for (long long i = 0; i < reps; ++i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        SignedProfile z = fluct_sample(rho, t, rng);
        std::vector<double> row(static_cast<std::size_t>(j_max));
        for (long long j = 1; j <= j_max; ++j) row[static_cast<std::size_t>(j - 1)] = z.at(j);
        out[static_cast<std::size_t>(i)] = std::move(row);
    }
    return out;
}

py::dict mgf_report(std::vector<double> g, double s, double rho, long long n_samples,
                    std::uint64_t seed, unsigned threads) {
    TestFunction tf{std::move(g)};
    MgfCheck mc = mgf_check(tf, s, rho, n_samples, seed, threads);
    py::dict d;
    d["analytic"] = mc.analytic;
    d["empirical_limit"] = mc.empirical_limit;
    d["se_limit"] = mc.se_limit;
    d["empirical_prelimit"] = mc.empirical_prelimit;
    d["se_prelimit"] = mc.se_prelimit;
    d["analytic_dds"] = mc.analytic_dds;
    d["generator_over_mgf"] = mc.generator_over_mgf;
    d["se_generator_over_mgf"] = mc.se_generator_over_mgf;
    return d;
}

py::dict kolmogorov_report(double rho, double t, double h, long long n_samples,
                           std::uint64_t seed, unsigned threads, long long cap) {
    BaseMeasure base = one_window(rho);
    CountFunctional f = make_capped_count(base.window("B"), cap);
    KolmogorovCheck chk = kolmogorov_residual(f, t, h, n_samples, seed, threads);
    py::dict d;
    d["lhs"] = chk.lhs;
    d["rhs"] = chk.rhs;
    d["mc_se"] = chk.mc_se;
    d["se_lhs"] = chk.se_lhs;
    d["se_rhs"] = chk.se_rhs;
    return d;
}

py::list verify(std::uint64_t seed, unsigned threads) {
    py::list out;
    for (const auto& c : run_verify_suite(seed, threads)) {
        py::dict d;
        d["index"] = c.index;
        d["name"] = c.name;
        d["passed"] = c.passed;
        d["waived"] = c.waived;
        d["note"] = c.note;
        py::list reports;
        for (const auto& r : c.reports) reports.append(report_to_dict(r));
        d["reports"] = reports;
        out.append(d);
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Samplers, exact laws, and verification checks for a spatial "
              "restaurant-style point process and its scaling limits";

    m.def("sample_counts", &sample_counts, py::arg("rho"), py::arg("z"), py::arg("reps"),
          py::arg("seed"),
          "Window counts of independent draws; each draw i uses stream i of `seed`.");
    m.def("sample_path_counts", &sample_path_counts, py::arg("rho"), py::arg("grid"),
          py::arg("reps"), py::arg("seed"),
          "Counts along a strictly increasing grid in [0,1) for `reps` paths.");
    m.def("arrival_times", &arrival_times, py::arg("rho"), py::arg("m_max"), py::arg("reps"),
          py::arg("seed"), "Stick-breaking arrival times tau_1 < ... < tau_m per replicate.");
    m.def("crp_seatings", &crp_seatings, py::arg("theta"), py::arg("n"), py::arg("reps"),
          py::arg("seed"),
          "Canonical seating strings extracted from timed arrivals at mass theta.");
    m.def("enumerate_seatings", &enumerate_crp, py::arg("theta"), py::arg("n"),
          "Exact seating law for n <= 12 customers.");
    m.def("expected_tables", &expected_tables, py::arg("theta"), py::arg("n"),
          "Expected occupied tables after n customers.");
    m.def("profile_counts", &profile_counts, py::arg("rho"), py::arg("t"), py::arg("reps"),
          py::arg("seed"), "Terminal multiplicity profiles {j: count} of the site walk.");
    m.def("marginal_profile_law", &marginal_profile_law, py::arg("rho"), py::arg("t"),
          "Poisson means rho t^j / j, truncated at negligible tail mass.");
    m.def("hydro_curve", &hydro_curve, py::arg("t_end"), py::arg("j_max"), py::arg("step"),
          "Fourth-order integration of the transport equation vs the analytic profile.");
    m.def("fluct_samples", &fluct_samples, py::arg("rho"), py::arg("t"), py::arg("j_max"),
          py::arg("reps"), py::arg("seed"),
          "Centered-and-scaled profile fields, one row of Z(1..j_max) per replicate.");
    m.def("mgf_report", &mgf_report, py::arg("g"), py::arg("s"), py::arg("rho"),
          py::arg("n_samples"), py::arg("seed"), py::arg("threads") = 1,
          "Analytic vs Monte Carlo log-moment-generating-function comparison.");
    m.def("kolmogorov_report", &kolmogorov_report, py::arg("rho"), py::arg("t"), py::arg("h"),
          py::arg("n_samples"), py::arg("seed"), py::arg("threads") = 1, py::arg("cap") = 50,
          "Forward-equation residual for the capped count functional.");
    m.def("verify", &verify, py::arg("seed"), py::arg("threads") = 1,
          "Full verification suite; returns one dict per criterion. Minutes, not seconds.");
}
