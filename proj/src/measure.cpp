#include "polyasim/measure.hpp"

#include <charconv>
#include <set>
#include <sstream>
#include <stdexcept>

namespace polyasim {

BaseMeasure::BaseMeasure(std::vector<Window> windows) : windows_(std::move(windows)) {
    std::set<std::string> seen;
    for (const auto& w : windows_) {
        if (w.mass < 0.0) throw std::invalid_argument("BaseMeasure: window mass must be >= 0");
        if (!seen.insert(w.id).second)
            throw std::invalid_argument("BaseMeasure: duplicate window id " + w.id);
    }
}

const Window& BaseMeasure::window(const std::string& id) const {
    for (const auto& w : windows_)
        if (w.id == id) return w;
    throw std::invalid_argument("BaseMeasure: unknown window id " + id);
}

bool BaseMeasure::has_window(const std::string& id) const {
    for (const auto& w : windows_)
        if (w.id == id) return true;
    return false;
}

double BaseMeasure::total_mass() const {
    double m = 0.0;
    for (const auto& w : windows_) m += w.mass;
    return m;
}

long long PointConfiguration::multiplicity(const Location& loc) const {
    auto it = atoms_.find(loc);
    return it == atoms_.end() ? 0 : it->second;
}

bool PointConfiguration::contains_tag(const std::string& window_id, std::uint64_t tag) const {
    return atoms_.count(Location{window_id, tag, 0.0}) > 0;
}

void PointConfiguration::add(const Location& loc, long long amount) {
    if (amount <= 0) throw std::invalid_argument("PointConfiguration::add: amount must be > 0");
    atoms_[loc] += amount;
}

long long PointConfiguration::total_count() const {
    long long n = 0;
    for (const auto& [loc, m] : atoms_) n += m;
    return n;
}

long long MultiplicityProfile::at(long long j) const {
    auto it = counts_.find(j);
    return it == counts_.end() ? 0 : it->second;
}

void MultiplicityProfile::set(long long j, long long c) {
    if (j < 1) throw std::invalid_argument("MultiplicityProfile: sites start at 1");
    if (c < 0) throw std::invalid_argument("MultiplicityProfile: counts are nonnegative");
    if (c == 0) counts_.erase(j);
    else counts_[j] = c;
}

void MultiplicityProfile::add(long long j, long long delta) {
    set(j, at(j) + delta);
}

long long MultiplicityProfile::total() const {
    long long n = 0;
    for (const auto& [j, c] : counts_) n += c;
    return n;
}

long long MultiplicityProfile::first_moment() const {
    long long n = 0;
    for (const auto& [j, c] : counts_) n += j * c;
    return n;
}

double SignedProfile::at(long long j) const {
    auto it = values_.find(j);
    return it == values_.end() ? 0.0 : it->second;
}

void SignedProfile::set(long long j, double v) {
    if (j < 1) throw std::invalid_argument("SignedProfile: sites start at 1");
    if (v == 0.0) values_.erase(j);
    else values_[j] = v;
}

void SignedProfile::add(long long j, double delta) {
    set(j, at(j) + delta);
}

long long SignedProfile::max_support() const {
    return values_.empty() ? 0 : values_.rbegin()->first;
}

double SignedProfile::pair_with(const std::vector<double>& g) const {
    double acc = 0.0;
    for (const auto& [j, v] : values_) {
        if (j >= 1 && static_cast<std::size_t>(j) <= g.size()) acc += v * g[j - 1];
    }
    return acc;
}

long long count(const PointConfiguration& config, const Window& window) {
    long long n = 0;
    for (const auto& [loc, m] : config.atoms())
        if (loc.window_id == window.id) n += m;
    return n;
}

PointConfiguration superpose(const PointConfiguration& a, const PointConfiguration& b) {
    PointConfiguration out = a;
    for (const auto& [loc, m] : b.atoms()) out.add(loc, m);
    return out;
}

bool dominates(const PointConfiguration& hi, const PointConfiguration& lo) {
    for (const auto& [loc, m] : lo.atoms())
        if (hi.multiplicity(loc) < m) return false;
    return true;
}

MultiplicityProfile profile(const PointConfiguration& config, const Window& window) {
    MultiplicityProfile eta;
    for (const auto& [loc, m] : config.atoms())
        if (loc.window_id == window.id) eta.add(m, 1);
    return eta;
}

long long first_moment(const MultiplicityProfile& eta) {
    return eta.first_moment();
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string to_csv(const PointConfiguration& config) {
    std::string out = "window_id,tag,coord,multiplicity\n";
    for (const auto& [loc, m] : config.atoms()) {
        out += loc.window_id;
        out += ',';
        out += std::to_string(loc.tag);
        out += ',';
        out += format_double(loc.coord);
        out += ',';
        out += std::to_string(m);
        out += '\n';
    }
    return out;
}

PointConfiguration config_from_csv(const std::string& csv) {
    PointConfiguration config;
    std::istringstream in(csv);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string window_id, tag_s, coord_s, mult_s;
        if (!std::getline(row, window_id, ',') || !std::getline(row, tag_s, ',') ||
            !std::getline(row, coord_s, ',') || !std::getline(row, mult_s, ','))
            throw std::invalid_argument("config_from_csv: malformed row: " + line);
        Location loc{window_id, std::stoull(tag_s), std::stod(coord_s)};
        config.add(loc, std::stoll(mult_s));
    }
    return config;
}

std::string to_csv(const MultiplicityProfile& eta) {
    std::string out = "j,count\n";
    for (const auto& [j, c] : eta.counts()) {
        out += std::to_string(j);
        out += ',';
        out += std::to_string(c);
        out += '\n';
    }
    return out;
}

} // namespace polyasim
