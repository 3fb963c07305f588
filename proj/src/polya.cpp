#include "polyasim/polya.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "polyasim/dist.hpp"

namespace polyasim {

PolyaParams::PolyaParams(double z_, BaseMeasure base_, std::string window_id_)
    : z(z_), base(std::move(base_)), window_id(std::move(window_id_)) {
    if (!(z >= 0.0 && z < 1.0)) throw std::invalid_argument("PolyaParams: z must be in [0,1)");
    if (!base.has_window(window_id))
        throw std::invalid_argument("PolyaParams: window " + window_id + " not in base measure");
}

Location fresh_location(const std::string& window_id, const PointConfiguration& existing,
                        RngStream& rng) {
    for (;;) {
        const std::uint64_t tag = rng.next_u64();
        if (!existing.contains_tag(window_id, tag)) return Location{window_id, tag, rng.uniform()};
    }
}

PointConfiguration sample_urn(const PolyaParams& p, const PointConfiguration& boost,
                              RngStream& rng) {
    const double rho = p.rho();
    for (const auto& [loc, m] : boost.atoms())
        if (loc.window_id != p.window_id)
            throw std::invalid_argument("sample_urn: boost atom outside the window");

    NegativeBinomial total_law{rho + static_cast<double>(boost.total_count()), p.z};
    const long long n = total_law.sample(rng);

    // One entry per unit of multiplicity currently in the urn, so a uniform
    // pick over entries joins an atom with probability proportional to its
    // multiplicity.
    std::vector<Location> units;
    units.reserve(static_cast<std::size_t>(boost.total_count() + n));
    for (const auto& [loc, m] : boost.atoms())
        for (long long k = 0; k < m; ++k) units.push_back(loc);

    PointConfiguration added;
    PointConfiguration occupied = boost;
    for (long long i = 0; i < n; ++i) {
        const double u = rng.uniform() * (rho + static_cast<double>(units.size()));
        Location loc = u < rho || units.empty()
                           ? fresh_location(p.window_id, occupied, rng)
                           : units[static_cast<std::size_t>(u - rho)];
        added.add(loc, 1);
        occupied.add(loc, 1);
        units.push_back(loc);
    }
    return added;
}

PointConfiguration sample_profile_method(const PolyaParams& p, RngStream& rng) {
    PointConfiguration config;
    if (p.z == 0.0) return config;
    const double intensity = -p.rho() * std::log1p(-p.z);
    const long long k = sample_poisson(rng, intensity);
    if (k == 0) return config;
    LogSeries mult_law(p.z);
    for (long long i = 0; i < k; ++i) {
        const long long m = mult_law.sample(rng);
        config.add(fresh_location(p.window_id, config, rng), m);
    }
    return config;
}

PointConfiguration thin(const PointConfiguration& config, double q, RngStream& rng) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("thin: q must be in [0,1]");
    PointConfiguration kept;
    for (const auto& [loc, m] : config.atoms()) {
        const long long surv = sample_binomial(rng, m, q);
        if (surv > 0) kept.add(loc, surv);
    }
    return kept;
}

double gamma_param(double z, double q) {
    if (!(z > 0.0 && z < 1.0)) throw std::invalid_argument("gamma_param: z must be in (0,1)");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("gamma_param: q must be in [0,1]");
    return z * q / (1.0 - z * (1.0 - q));
}

PointConfiguration condense(const PolyaParams& p, double gamma, RngStream& rng) {
    if (!(gamma >= 0.0 && gamma <= p.z))
        throw std::invalid_argument("condense: gamma must be in [0, z]");
    PolyaParams stage1{gamma, p.base, p.window_id};
    PointConfiguration nu = sample_profile_method(stage1, rng);
    PolyaParams stage2{(p.z - gamma) / (1.0 - gamma), p.base, p.window_id};
    PointConfiguration mu = sample_urn(stage2, nu, rng);
    return superpose(mu, nu);
}

} // namespace polyasim
