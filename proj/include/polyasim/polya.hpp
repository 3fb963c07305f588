#pragma once

#include <string>

#include "polyasim/measure.hpp"
#include "polyasim/rng.hpp"

namespace polyasim {

// Parameters of the Polya sum process restricted to one window of the base
// measure: activity z in [0,1) and the window the samplers populate.
struct PolyaParams {
    double z = 0.0;
    BaseMeasure base;
    std::string window_id;

    PolyaParams(double z_, BaseMeasure base_, std::string window_id_);
    const Window& window() const { return base.window(window_id); }
    double rho() const { return window().mass; }
};

// Draws a fresh atom location in the window with a tag unused by `existing`.
Location fresh_location(const std::string& window_id, const PointConfiguration& existing,
                        RngStream& rng);

// Sequential urn sampler for the process boosted by `boost` (the nu in the
// boosted intensity rho + nu): N ~ NB(rho(B) + boost(B), z) points are placed
// one at a time, each opening a fresh atom with probability proportional to
// rho(B) or joining an existing unit (boost and earlier points alike) with
// probability proportional to its current multiplicity. Returns only the newly
// added points.
PointConfiguration sample_urn(const PolyaParams& p, const PointConfiguration& boost,
                              RngStream& rng);

// Poisson-profile sampler for the boost-free process: K ~ Poisson(-rho(B)
// log(1-z)) atoms, each carrying an independent logarithmic-series(z)
// multiplicity. Equal in law to sample_urn with empty boost.
PointConfiguration sample_profile_method(const PolyaParams& p, RngStream& rng);

// Independent thinning: every unit of multiplicity survives independently with
// probability q, so each atom's multiplicity is replaced by a Binomial(m, q)
// draw and emptied atoms vanish. The output is always dominated by the input.
PointConfiguration thin(const PointConfiguration& config, double q, RngStream& rng);

// The thinned activity gamma(z, q) = z q / (1 - z (1 - q)).
double gamma_param(double z, double q);

// Two-stage condensation: nu ~ activity `gamma`, then the remainder at
// activity (z - gamma) / (1 - gamma) boosted by nu; the superposition is equal
// in law to a plain draw at activity z.
PointConfiguration condense(const PolyaParams& p, double gamma, RngStream& rng);

} // namespace polyasim
