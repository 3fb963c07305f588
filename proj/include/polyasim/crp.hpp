#pragma once

#include <map>
#include <string>
#include <vector>

#include "polyasim/measure.hpp"
#include "polyasim/rng.hpp"

namespace polyasim {

// A partition of customers 1..n into nonempty disjoint blocks.
struct Partition {
    std::vector<std::vector<int>> blocks;
};

// table_of[i] is the (1-based) table chosen by customer i+1; table labels
// appear in first-use order, so the sequence is a canonical encoding of the
// partition it induces.
struct SeatingSequence {
    std::vector<int> table_of;

    std::string encode() const; // e.g. "1,1,2"
    int table_count() const;
};

// One timed arrival in a window: the atom the arriving point landed on.
struct ArrivalEvent {
    double time = 0.0;
    Location atom;
};

// Translates time-ordered arrivals into a seating: customer m opens a new
// table iff its atom was never hit before, otherwise it joins that atom's
// table. Ties in time are rejected (they are almost surely absent).
SeatingSequence extract_seating(const std::vector<ArrivalEvent>& events);

// Appends one customer to a seating by the classical restaurant rule: a new
// table with probability theta/(theta+n), an occupied table of size y with
// probability y/(theta+n). Reference implementation used as an oracle.
SeatingSequence crp_reference_step(const SeatingSequence& seating, double theta, RngStream& rng);

// Exact law of the canonical seating after n customers: encode() -> mass.
std::map<std::string, double> enumerate_crp(double theta, int n);

// Expected number of occupied tables after n customers, sum_{k<n} theta/(theta+k).
double expected_tables(double theta, long long n);

Partition partition_from_seating(const SeatingSequence& seating);

// One line per block, customer indices comma-separated.
std::string export_partition(const Partition& partition);

// Event-exact simulation of the first n arrivals in the window: stick-breaking
// arrival times paired with urn choices (fresh atom with weight rho(B), join
// with weight equal to current multiplicity).
std::vector<ArrivalEvent> simulate_arrival_events(const BaseMeasure& base,
                                                  const std::string& window_id, long long n,
                                                  RngStream& rng);

// Grid-refinement extraction: samples the process on a uniform grid over
// (0, t_end], restarting on a doubled grid whenever two arrivals share a cell
// or fewer than n arrivals occurred, until the first n arrivals are isolated
// in distinct cells. Both restart events depend on arrival times only, and the
// seating choices are independent of the times, so the restarts do not bias
// the extracted seating law. Gives up past max_refine doublings.
SeatingSequence extract_seating_grid(const BaseMeasure& base, const std::string& window_id,
                                     long long n, double t_end, int max_refine, RngStream& rng);

// Pointwise superposition of two trajectories on identical grids.
Trajectory superpose_processes(const Trajectory& a, const Trajectory& b);

// Containment report for the sub-window coupling: the inner process is the
// restriction of `traj` to atoms whose coordinate falls below
// inner.mass/outer.mass, and every inner atom must appear in the outer state
// with identical multiplicity at every grid time.
struct NestedCouplingReport {
    long long violations = 0;
    std::vector<long long> inner_counts; // per grid time
    std::vector<long long> outer_counts; // per grid time
};

NestedCouplingReport nested_coupling_check(const Trajectory& traj, const Window& inner,
                                           const Window& outer);

} // namespace polyasim
