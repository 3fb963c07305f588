#include "doctest.h"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyasim/crp.hpp"
#include "polyasim/measure.hpp"
#include "polyasim/scrp.hpp"
#include "polyasim/stats.hpp"

using namespace polyasim;

namespace {

BaseMeasure one_window(double mass) { return BaseMeasure({Window{"B", mass}}); }

// Chi-square of simulated seatings against an exact seating law.
TestReport seating_chi_square(const std::string& name,
                              const std::map<std::string, double>& law,
                              const std::map<std::string, long long>& observed, long long n) {
    std::vector<long long> obs;
    std::vector<double> expected;
    long long seen = 0;
    for (const auto& [key, prob] : law) {
        auto it = observed.find(key);
        long long c = it == observed.end() ? 0 : it->second;
        obs.push_back(c);
        seen += c;
        expected.push_back(prob * static_cast<double>(n));
    }
    // Every simulated seating must be inside the enumerated support.
    REQUIRE(seen == n);
    return chi_square_gof(name, obs, expected);
}

} // namespace

TEST_CASE("seating encode and table count") {
    SeatingSequence s;
    s.table_of = {1, 1, 2, 1, 3};
    CHECK(s.encode() == "1,1,2,1,3");
    CHECK(s.table_count() == 3);
    CHECK(SeatingSequence{}.table_count() == 0);
}

TEST_CASE("seating extraction from events") {
    Location a{"B", 1, 0.2};
    Location b{"B", 2, 0.7};
    std::vector<ArrivalEvent> events{{0.1, a}};
    CHECK(extract_seating(events).encode() == "1");

    events = {{0.1, a}, {0.2, a}, {0.3, b}};
    CHECK(extract_seating(events).encode() == "1,1,2");

    events = {{0.1, a}, {0.3, b}, {0.4, a}, {0.5, b}};
    CHECK(extract_seating(events).encode() == "1,2,1,2");

    CHECK(extract_seating({}).table_of.empty());
    std::vector<ArrivalEvent> bad{{0.2, a}, {0.2, b}};
    CHECK_THROWS_AS(extract_seating(bad), std::invalid_argument);
}

TEST_CASE("reference step from the empty restaurant") {
    RngStream rng(800, 0);
    for (int i = 0; i < 10; ++i) {
        SeatingSequence s = crp_reference_step({}, 1.0, rng);
        CHECK(s.encode() == "1");
    }
    CHECK_THROWS_AS(crp_reference_step({}, 0.0, rng), std::invalid_argument);
}

TEST_CASE("exact enumeration at small n") {
    auto law = enumerate_crp(1.0, 3);
    REQUIRE(law.size() == 5);
    CHECK(law.at("1,1,1") == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(law.at("1,1,2") == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(law.at("1,2,1") == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(law.at("1,2,2") == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(law.at("1,2,3") == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

    // Table-count marginal: {1: 1/3, 2: 1/2, 3: 1/6}.
    std::map<int, double> by_tables;
    for (const auto& [key, p] : law) {
        SeatingSequence s;
        for (char c : key)
            if (c != ',') s.table_of.push_back(c - '0');
        by_tables[s.table_count()] += p;
    }
    CHECK(by_tables[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(by_tables[2] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(by_tables[3] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

    // n = 4 has Bell(4) = 15 canonical seatings; masses sum to one.
    auto law4 = enumerate_crp(0.5, 4);
    CHECK(law4.size() == 15);
    double total = 0.0;
    for (const auto& [key, p] : law4) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(enumerate_crp(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_crp(1.0, 13), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_crp(-1.0, 3), std::invalid_argument);
}

TEST_CASE("expected table counts") {
    CHECK(expected_tables(1.0, 3) == doctest::Approx(11.0 / 6.0).epsilon(1e-14));
    CHECK(expected_tables(2.5, 1) == doctest::Approx(1.0).epsilon(1e-14));
    // Cross-check against the enumerated law.
    auto law = enumerate_crp(2.0, 5);
    double mean = 0.0;
    for (const auto& [key, p] : law) {
        SeatingSequence s;
        for (char c : key)
            if (c != ',') s.table_of.push_back(c - '0');
        mean += p * s.table_count();
    }
    CHECK(mean == doctest::Approx(expected_tables(2.0, 5)).epsilon(1e-12));
}

TEST_CASE("reference chain reproduces the enumerated law") {
    RngStream rng(801, 0);
    const int n = 20000;
    auto law = enumerate_crp(2.0, 4);
    std::map<std::string, long long> observed;
    for (int i = 0; i < n; ++i) {
        SeatingSequence s;
        for (int m = 0; m < 4; ++m) s = crp_reference_step(s, 2.0, rng);
        ++observed[s.encode()];
    }
    auto rep = seating_chi_square("reference-chain", law, observed, n);
    CHECK(rep.passed);
}

TEST_CASE("partition conversion and export") {
    SeatingSequence s;
    s.table_of = {1, 1, 2};
    Partition p = partition_from_seating(s);
    REQUIRE(p.blocks.size() == 2);
    CHECK(p.blocks[0] == std::vector<int>{1, 2});
    CHECK(p.blocks[1] == std::vector<int>{3});
    CHECK(export_partition(p) == "1,2\n3\n");
}

TEST_CASE("event-exact arrivals have increasing times and the restaurant law") {
    RngStream rng(802, 0);
    BaseMeasure base = one_window(1.0);
    const int n = 20000;
    auto law = enumerate_crp(1.0, 3);
    std::map<std::string, long long> observed;
    for (int i = 0; i < n; ++i) {
        auto events = simulate_arrival_events(base, "B", 3, rng);
        REQUIRE(events.size() == 3);
        CHECK(events[0].time < events[1].time);
        CHECK(events[1].time < events[2].time);
        CHECK(events[2].time < 1.0);
        ++observed[extract_seating(events).encode()];
    }
    auto rep = seating_chi_square("event-exact-seating", law, observed, n);
    CHECK(rep.passed);
}

TEST_CASE("grid-refinement extraction matches the same law") {
    RngStream rng(803, 0);
    BaseMeasure base = one_window(1.0);
    const int n = 20000;
    auto law = enumerate_crp(1.0, 3);
    std::map<std::string, long long> observed;
    for (int i = 0; i < n; ++i) {
        SeatingSequence s = extract_seating_grid(base, "B", 3, 0.9, 30, rng);
        REQUIRE(s.table_of.size() == 3);
        ++observed[s.encode()];
    }
    auto rep = seating_chi_square("grid-seating", law, observed, n);
    CHECK(rep.passed);
    CHECK_THROWS_AS(extract_seating_grid(base, "B", 3, 1.0, 30, rng), std::invalid_argument);
}

TEST_CASE("superposing trajectories") {
    RngStream r1(804, 0);
    RngStream r2(804, 1);
    std::vector<double> grid{0.25, 0.5};
    BaseMeasure b1 = one_window(1.0);
    BaseMeasure b2 = one_window(2.0);
    Trajectory a = sample_path(grid, b1, r1);
    Trajectory b = sample_path(grid, b2, r2);

    Trajectory empty_b;
    empty_b.times = grid;
    empty_b.states.resize(grid.size());
    Trajectory same = superpose_processes(a, empty_b);
    for (std::size_t k = 0; k < grid.size(); ++k)
        CHECK(same.states[k].atoms() == a.states[k].atoms());

    Trajectory s = superpose_processes(a, b);
    Window B{"B", 0.0};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(count(s.states[k], B) == count(a.states[k], B) + count(b.states[k], B));
        CHECK(dominates(s.states[k], a.states[k]));
    }

    Trajectory wrong;
    wrong.times = {0.25};
    wrong.states.resize(1);
    CHECK_THROWS_AS(superpose_processes(a, wrong), std::invalid_argument);
}

TEST_CASE("superposed counts keep the additive mass law") {
    // Mass 1 + mass 2 superposed at t = 1/2 must give an NB(3, 1/2) count.
    RngStream r1(805, 0);
    RngStream r2(805, 1);
    std::vector<double> grid{0.5};
    BaseMeasure b1 = one_window(1.0);
    BaseMeasure b2 = one_window(2.0);
    Window B{"B", 0.0};
    const int n = 20000;
    std::vector<double> counts(n);
    for (int i = 0; i < n; ++i) {
        Trajectory a = sample_path(grid, b1, r1);
        Trajectory b = sample_path(grid, b2, r2);
        counts[i] = static_cast<double>(count(superpose_processes(a, b).states[0], B));
    }
    // NB(3, 1/2): mean 3, variance 6.
    CHECK(moment_check("superposed-count", counts, 3.0, 6.0).passed);
}

TEST_CASE("nested coupling containment and restriction law") {
    RngStream rng(806, 0);
    Window inner{"B", 1.0};
    Window outer{"B", 2.0};
    BaseMeasure base({outer});
    std::vector<double> grid{0.3, 0.6};
    const int n = 5000;
    std::vector<double> inner_final(n);
    for (int i = 0; i < n; ++i) {
        Trajectory traj = sample_path(grid, base, rng);
        auto report = nested_coupling_check(traj, inner, outer);
        CHECK(report.violations == 0);
        REQUIRE(report.inner_counts.size() == grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k)
            CHECK(report.inner_counts[k] <= report.outer_counts[k]);
        inner_final[i] = static_cast<double>(report.inner_counts.back());
        // Equal windows make the restriction total.
        auto full = nested_coupling_check(traj, outer, outer);
        for (std::size_t k = 0; k < grid.size(); ++k)
            CHECK(full.inner_counts[k] == full.outer_counts[k]);
    }
    // Restriction to half the mass at t = 0.6: NB(1, 0.6), mean 1.5,
    // variance 1.5/0.4 = 3.75.
    CHECK(moment_check("inner-count", inner_final, 1.5, 3.75).passed);

    CHECK_THROWS_AS(nested_coupling_check({}, outer, inner), std::invalid_argument);
}
