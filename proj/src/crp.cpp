#include "polyasim/crp.hpp"

#include <algorithm>
#include <stdexcept>

#include "polyasim/polya.hpp"
#include "polyasim/scrp.hpp"

namespace polyasim {

std::string SeatingSequence::encode() const {
    std::string out;
    for (std::size_t i = 0; i < table_of.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(table_of[i]);
    }
    return out;
}

int SeatingSequence::table_count() const {
    int mx = 0;
    for (int t : table_of) mx = std::max(mx, t);
    return mx;
}

SeatingSequence extract_seating(const std::vector<ArrivalEvent>& events) {
    SeatingSequence seating;
    std::map<Location, int> table_of_atom;
    double prev_time = -1.0;
    for (const auto& ev : events) {
        if (ev.time <= prev_time)
            throw std::invalid_argument("extract_seating: event times must strictly increase");
        prev_time = ev.time;
        auto [it, fresh] = table_of_atom.try_emplace(ev.atom, static_cast<int>(table_of_atom.size()) + 1);
        seating.table_of.push_back(it->second);
        (void)fresh;
    }
    return seating;
}

SeatingSequence crp_reference_step(const SeatingSequence& seating, double theta, RngStream& rng) {
    if (!(theta > 0.0)) throw std::invalid_argument("crp_reference_step: theta must be > 0");
    const int tables = seating.table_count();
    std::vector<long long> sizes(static_cast<std::size_t>(tables), 0);
    for (int t : seating.table_of) ++sizes[static_cast<std::size_t>(t - 1)];

    const double n = static_cast<double>(seating.table_of.size());
    double u = rng.uniform() * (theta + n);
    SeatingSequence out = seating;
    if (u < theta) {
        out.table_of.push_back(tables + 1);
        return out;
    }
    u -= theta;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        u -= static_cast<double>(sizes[k]);
        if (u < 0.0) {
            out.table_of.push_back(static_cast<int>(k) + 1);
            return out;
        }
    }
    // Floating-point edge: attribute the boundary to the last table.
    out.table_of.push_back(tables);
    return out;
}

std::map<std::string, double> enumerate_crp(double theta, int n) {
    if (!(theta > 0.0)) throw std::invalid_argument("enumerate_crp: theta must be > 0");
    if (n < 1 || n > 12) throw std::invalid_argument("enumerate_crp: n must be in 1..12");

    // State: canonical seating prefix and its probability.
    std::map<std::string, double> current{{"1", 1.0}};
    std::map<std::string, std::vector<int>> decoded{{"1", {1}}};
    for (int m = 1; m < n; ++m) {
        std::map<std::string, double> next;
        std::map<std::string, std::vector<int>> next_decoded;
        for (const auto& [key, prob] : current) {
            const auto& seating = decoded[key];
            const int tables = *std::max_element(seating.begin(), seating.end());
            std::vector<long long> sizes(static_cast<std::size_t>(tables), 0);
            for (int t : seating) ++sizes[static_cast<std::size_t>(t - 1)];

            auto push = [&](int table, double p) {
                std::vector<int> child = seating;
                child.push_back(table);
                SeatingSequence tmp;
                tmp.table_of = child;
                const std::string ck = tmp.encode();
                next[ck] += prob * p;
                next_decoded.emplace(ck, std::move(child));
            };
            push(tables + 1, theta / (theta + m));
            for (int k = 0; k < tables; ++k)
                push(k + 1, static_cast<double>(sizes[static_cast<std::size_t>(k)]) / (theta + m));
        }
        current = std::move(next);
        decoded = std::move(next_decoded);
    }
    return current;
}

double expected_tables(double theta, long long n) {
    double sum = 0.0;
    for (long long k = 0; k < n; ++k) sum += theta / (theta + static_cast<double>(k));
    return sum;
}

Partition partition_from_seating(const SeatingSequence& seating) {
    Partition p;
    p.blocks.resize(static_cast<std::size_t>(seating.table_count()));
    for (std::size_t i = 0; i < seating.table_of.size(); ++i)
        p.blocks[static_cast<std::size_t>(seating.table_of[i] - 1)].push_back(static_cast<int>(i) + 1);
    return p;
}

std::string export_partition(const Partition& partition) {
    std::string out;
    for (const auto& block : partition.blocks) {
        for (std::size_t i = 0; i < block.size(); ++i) {
            if (i > 0) out += ',';
            out += std::to_string(block[i]);
        }
        out += '\n';
    }
    return out;
}

std::vector<ArrivalEvent> simulate_arrival_events(const BaseMeasure& base,
                                                  const std::string& window_id, long long n,
                                                  RngStream& rng) {
    const double rho = base.window(window_id).mass;
    const std::vector<double> times = sample_arrivals_stick(rho, n, rng);

    std::vector<ArrivalEvent> events;
    events.reserve(static_cast<std::size_t>(n));
    PointConfiguration occupied;
    std::vector<Location> units;
    for (long long m = 0; m < n; ++m) {
        const double u = rng.uniform() * (rho + static_cast<double>(units.size()));
        Location loc = u < rho ? fresh_location(window_id, occupied, rng)
                               : units[static_cast<std::size_t>(u - rho)];
        events.push_back(ArrivalEvent{times[static_cast<std::size_t>(m)], loc});
        occupied.add(loc, 1);
        units.push_back(loc);
    }
    return events;
}

SeatingSequence extract_seating_grid(const BaseMeasure& base, const std::string& window_id,
                                     long long n, double t_end, int max_refine, RngStream& rng) {
    if (!(t_end > 0.0 && t_end < 1.0))
        throw std::invalid_argument("extract_seating_grid: t_end must lie in (0,1)");
    if (n < 1) throw std::invalid_argument("extract_seating_grid: n must be >= 1");

    long long cells = 16;
    for (int refine = 0; refine <= max_refine; ++refine, cells *= 2) {
        std::vector<ArrivalEvent> events;
        PointConfiguration state;
        double prev = 0.0;
        bool collided = false;
        for (long long c = 1; c <= cells && !collided; ++c) {
            const double t_c = t_end * static_cast<double>(c) / static_cast<double>(cells);
            const double z = (t_c - prev) / (1.0 - prev);
            PolyaParams params{z, base, window_id};
            PointConfiguration increment = sample_urn(params, state, rng);
            const long long added = increment.total_count();
            if (added >= 2) {
                collided = true;
            } else if (added == 1) {
                events.push_back(ArrivalEvent{t_c, increment.atoms().begin()->first});
            }
            state = superpose(state, increment);
            prev = t_c;
            if (static_cast<long long>(events.size()) == n)
                return extract_seating(events);
        }
        // Either a cell held two arrivals or fewer than n arrivals occurred;
        // both events are functions of the arrival times alone, so restarting
        // on a finer grid leaves the seating law untouched.
    }
    throw std::runtime_error("extract_seating_grid: refinement cap exceeded");
}

Trajectory superpose_processes(const Trajectory& a, const Trajectory& b) {
    if (a.times != b.times)
        throw std::invalid_argument("superpose_processes: time grids differ");
    Trajectory out;
    out.times = a.times;
    out.states.reserve(a.states.size());
    for (std::size_t k = 0; k < a.states.size(); ++k)
        out.states.push_back(superpose(a.states[k], b.states[k]));
    return out;
}

NestedCouplingReport nested_coupling_check(const Trajectory& traj, const Window& inner,
                                           const Window& outer) {
    if (inner.mass > outer.mass)
        throw std::invalid_argument("nested_coupling_check: inner mass exceeds outer mass");
    const double frac = outer.mass > 0.0 ? inner.mass / outer.mass : 0.0;

    NestedCouplingReport report;
    for (const auto& state : traj.states) {
        long long in_count = 0;
        long long out_count = 0;
        for (const auto& [loc, m] : state.atoms()) {
            if (loc.window_id != outer.id) continue;
            out_count += m;
            if (loc.coord < frac) {
                in_count += m;
                // Containment: the inner atom must exist in the outer state
                // with the same multiplicity.
                if (state.multiplicity(loc) != m) ++report.violations;
            }
        }
        if (in_count > out_count) ++report.violations;
        report.inner_counts.push_back(in_count);
        report.outer_counts.push_back(out_count);
    }
    return report;
}

} // namespace polyasim
