#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace polyasim {

// A bounded observation window. Only its mass ever enters a law, so the
// geometry is reduced to an id plus a nonnegative mass.
struct Window {
    std::string id;
    double mass = 0.0;
};

// Diffuse base measure given by per-window masses. Window ids are unique.
class BaseMeasure {
public:
    BaseMeasure() = default;
    explicit BaseMeasure(std::vector<Window> windows);

    const std::vector<Window>& windows() const { return windows_; }
    const Window& window(const std::string& id) const;
    bool has_window(const std::string& id) const;
    double mass(const std::string& id) const { return window(id).mass; }
    double total_mass() const;

private:
    std::vector<Window> windows_;
};

// Atom site: a window id plus a draw tag and a uniform coordinate. The tag
// makes diffuseness structural; fresh draws can never land on an occupied
// site. Ordering (and identity) is by (window_id, tag) only, which is also
// the canonical serialization order.
struct Location {
    std::string window_id;
    std::uint64_t tag = 0;
    double coord = 0.0;

    friend bool operator<(const Location& a, const Location& b) {
        if (a.window_id != b.window_id) return a.window_id < b.window_id;
        return a.tag < b.tag;
    }
    friend bool operator==(const Location& a, const Location& b) {
        return a.window_id == b.window_id && a.tag == b.tag;
    }
};

// Finite point measure: locations with positive integer multiplicities.
class PointConfiguration {
public:
    using AtomMap = std::map<Location, long long>;

    PointConfiguration() = default;

    const AtomMap& atoms() const { return atoms_; }
    bool empty() const { return atoms_.empty(); }
    std::size_t atom_count() const { return atoms_.size(); }

    long long multiplicity(const Location& loc) const;
    bool contains_tag(const std::string& window_id, std::uint64_t tag) const;

    // Adds amount (>0) to the atom at loc, creating it if absent.
    void add(const Location& loc, long long amount = 1);

    long long total_count() const;

private:
    AtomMap atoms_;
};

// Counts atoms of a window by multiplicity: counts[j] = #atoms with
// multiplicity exactly j.
class MultiplicityProfile {
public:
    using CountMap = std::map<long long, long long>;

    MultiplicityProfile() = default;

    const CountMap& counts() const { return counts_; }
    bool empty() const { return counts_.empty(); }

    long long at(long long j) const;
    void set(long long j, long long c);
    void add(long long j, long long delta);

    long long total() const;       // eta(N), number of atoms
    long long first_moment() const; // J(eta) = sum j eta(j)

    friend bool operator==(const MultiplicityProfile& a, const MultiplicityProfile& b) {
        return a.counts_ == b.counts_;
    }

private:
    CountMap counts_;
};

// Real-valued finitely supported function on the positive integers; state
// type of centered and fluctuation processes.
class SignedProfile {
public:
    using ValueMap = std::map<long long, double>;

    SignedProfile() = default;

    const ValueMap& values() const { return values_; }
    double at(long long j) const;
    void set(long long j, double v);
    void add(long long j, double delta);

    long long max_support() const;

    // sum_j values[j] * g(j) over the support.
    double pair_with(const std::vector<double>& g) const;

private:
    ValueMap values_;
};

// Increasing time grid with the process state at each time.
struct Trajectory {
    std::vector<double> times;
    std::vector<PointConfiguration> states;
};

long long count(const PointConfiguration& config, const Window& window);
PointConfiguration superpose(const PointConfiguration& a, const PointConfiguration& b);
bool dominates(const PointConfiguration& hi, const PointConfiguration& lo);
MultiplicityProfile profile(const PointConfiguration& config, const Window& window);
long long first_moment(const MultiplicityProfile& eta);

// CSV: one row per atom, "window_id,tag,coord,multiplicity", atoms in
// canonical (window_id, tag) order.
std::string to_csv(const PointConfiguration& config);
PointConfiguration config_from_csv(const std::string& csv);

// CSV: "j,count" rows in increasing j.
std::string to_csv(const MultiplicityProfile& eta);

// Shortest round-trip decimal representation; used everywhere numbers are
// serialized so that identical values give identical bytes.
std::string format_double(double v);

} // namespace polyasim
