#include "polyasim/mprw.hpp"

#include <cmath>
#include <stdexcept>

namespace polyasim {

std::vector<MultiplicityProfile> ProfileTrajectory::states() const {
    std::vector<MultiplicityProfile> out;
    out.reserve(events.size());
    MultiplicityProfile eta;
    for (const auto& ev : events) {
        if (ev.kind == ProfileEvent::Kind::birth) {
            eta.add(1, 1);
        } else {
            eta.add(ev.j, -1);
            eta.add(ev.j + 1, 1);
        }
        out.push_back(eta);
    }
    return out;
}

MultiplicityProfile ProfileTrajectory::terminal() const {
    MultiplicityProfile eta;
    for (const auto& ev : events) {
        if (ev.kind == ProfileEvent::Kind::birth) {
            eta.add(1, 1);
        } else {
            eta.add(ev.j, -1);
            eta.add(ev.j + 1, 1);
        }
    }
    return eta;
}

void ProfileTrajectory::validate() const {
    double prev_u = 0.0;
    MultiplicityProfile eta;
    for (const auto& ev : events) {
        if (!(ev.u_time > prev_u))
            throw std::runtime_error("ProfileTrajectory: event times must strictly increase");
        prev_u = ev.u_time;
        const double expect_s = 1.0 - std::exp(-ev.u_time);
        if (std::abs(ev.s_time - expect_s) > 1e-12)
            throw std::runtime_error("ProfileTrajectory: clocks disagree");
        if (ev.kind == ProfileEvent::Kind::birth) {
            if (ev.j != 1) throw std::runtime_error("ProfileTrajectory: birth must hit site 1");
            eta.add(1, 1);
        } else {
            if (eta.at(ev.j) < 1)
                throw std::runtime_error("ProfileTrajectory: hop from an empty site");
            eta.add(ev.j, -1);
            eta.add(ev.j + 1, 1);
        }
    }
}

std::string ProfileTrajectory::to_csv() const {
    std::string out = "u_time,s_time,event_kind,j\n";
    for (const auto& ev : events) {
        out += format_double(ev.u_time);
        out += ',';
        out += format_double(ev.s_time);
        out += ',';
        out += ev.kind == ProfileEvent::Kind::birth ? "birth" : "hop";
        out += ',';
        out += std::to_string(ev.j);
        out += '\n';
    }
    out += "j,count\n";
    for (const auto& [j, c] : terminal().counts()) {
        out += std::to_string(j);
        out += ',';
        out += std::to_string(c);
        out += '\n';
    }
    return out;
}

ProfileTrajectory simulate_events(double rhoB, double t_end, RngStream& rng) {
    if (!(rhoB > 0.0)) throw std::invalid_argument("simulate_events: rhoB must be > 0");
    if (!(t_end >= 0.0 && t_end < 1.0))
        throw std::invalid_argument("simulate_events: t_end must lie in [0,1)");

    ProfileTrajectory traj;
    traj.t_end = t_end;
    const double u_end = -std::log1p(-t_end);
    MultiplicityProfile eta;
    double u = 0.0;
    long long weight = 0; // sum_j j * eta(j), the total hop rate
    for (;;) {
        const double rate = rhoB + static_cast<double>(weight);
        u += sample_exponential(rng, rate);
        if (u >= u_end) break;

        ProfileEvent ev;
        ev.u_time = u;
        ev.s_time = 1.0 - std::exp(-u);
        const double pick = rng.uniform() * rate;
        if (pick < rhoB) {
            ev.kind = ProfileEvent::Kind::birth;
            ev.j = 1;
            eta.add(1, 1);
            weight += 1;
        } else {
            // Choose the source site with probability proportional to j*eta(j).
            double remaining = pick - rhoB;
            long long src = 0;
            for (const auto& [j, c] : eta.counts()) {
                remaining -= static_cast<double>(j) * static_cast<double>(c);
                if (remaining < 0.0) {
                    src = j;
                    break;
                }
            }
            if (src == 0) src = eta.counts().rbegin()->first;
            ev.kind = ProfileEvent::Kind::hop;
            ev.j = src;
            eta.add(src, -1);
            eta.add(src + 1, 1);
            weight += 1;
        }
        traj.events.push_back(ev);
    }
    return traj;
}

std::vector<TrackedStack> simulate_tracked(double rhoB, double s_mark, double t_end,
                                           RngStream& rng) {
    if (!(rhoB > 0.0)) throw std::invalid_argument("simulate_tracked: rhoB must be > 0");
    if (!(0.0 <= s_mark && s_mark <= t_end && t_end < 1.0))
        throw std::invalid_argument("simulate_tracked: need 0 <= s_mark <= t_end < 1");

    const double u_mark = -std::log1p(-s_mark);
    const double u_end = -std::log1p(-t_end);

    struct Live {
        double birth_u;
        long long size;
        long long size_at_mark; // filled when the mark is crossed
    };
    std::vector<Live> stacks;
    double u = 0.0;
    long long weight = 0;
    bool marked = s_mark == 0.0;
    auto cross_mark = [&]() {
        for (auto& st : stacks) st.size_at_mark = st.size;
        marked = true;
    };
    for (;;) {
        const double rate = rhoB + static_cast<double>(weight);
        const double next_u = u + sample_exponential(rng, rate);
        if (!marked && next_u >= u_mark) cross_mark();
        u = next_u;
        if (u >= u_end) break;

        const double pick = rng.uniform() * rate;
        if (pick < rhoB) {
            stacks.push_back(Live{u, 1, 0});
        } else {
            double remaining = pick - rhoB;
            std::size_t idx = stacks.size() - 1;
            for (std::size_t k = 0; k < stacks.size(); ++k) {
                remaining -= static_cast<double>(stacks[k].size);
                if (remaining < 0.0) {
                    idx = k;
                    break;
                }
            }
            ++stacks[idx].size;
        }
        weight += 1;
    }
    if (!marked) cross_mark();

    std::vector<TrackedStack> out;
    out.reserve(stacks.size());
    for (const auto& st : stacks)
        out.push_back(TrackedStack{st.birth_u, st.birth_u <= u_mark ? st.size_at_mark : 0,
                                   st.size});
    return out;
}

std::vector<double> marginal_profile_law(double rhoB, double t) {
    if (!(rhoB > 0.0)) throw std::invalid_argument("marginal_profile_law: rhoB must be > 0");
    if (!(t > 0.0 && t < 1.0))
        throw std::invalid_argument("marginal_profile_law: t must lie in (0,1)");
    const double total = -rhoB * std::log1p(-t);
    std::vector<double> lambda;
    double partial = 0.0;
    double power = t;
    for (long long j = 1;; ++j) {
        const double lj = rhoB * power / static_cast<double>(j);
        lambda.push_back(lj);
        partial += lj;
        power *= t;
        if (total - partial < 1e-12) break;
    }
    return lambda;
}

double profile_generator_apply(const std::function<double(const MultiplicityProfile&)>& f,
                               const MultiplicityProfile& eta, double s, double rhoB) {
    if (!(s < 1.0)) throw std::invalid_argument("profile_generator_apply: s must be < 1");
    const double f0 = f(eta);
    MultiplicityProfile birth = eta;
    birth.add(1, 1);
    double acc = rhoB * (f(birth) - f0);
    for (const auto& [j, c] : eta.counts()) {
        MultiplicityProfile hop = eta;
        hop.add(j, -1);
        hop.add(j + 1, 1);
        acc += static_cast<double>(j) * static_cast<double>(c) * (f(hop) - f0);
    }
    return acc / (1.0 - s);
}

DifferentiableFunctional::DifferentiableFunctional(Eval eval, Grad grad, double bound)
    : eval_(std::move(eval)), grad_(std::move(grad)), bound_(bound) {
    check_gradient();
}

DifferentiableFunctional::DifferentiableFunctional(Eval eval, Grad grad, Hess hess, double bound)
    : eval_(std::move(eval)), grad_(std::move(grad)), hess_(std::move(hess)), bound_(bound) {
    check_gradient();
}

double DifferentiableFunctional::hess(const SignedProfile& xi, long long j, long long k) const {
    if (!hess_) throw std::logic_error("DifferentiableFunctional: no Hessian supplied");
    return hess_(xi, j, k);
}

void DifferentiableFunctional::check_gradient() const {
    // Probe a handful of fixed random points: central finite differences of
    // eval must match the supplied derivative to 1e-6 relative accuracy.
    RngStream rng(0x9E3779B97F4A7C15ULL, 0);
    const double h = 1e-6;
    for (int probe = 0; probe < 4; ++probe) {
        SignedProfile xi;
        for (long long j = 1; j <= 4; ++j) xi.set(j, 2.0 * rng.uniform() - 1.0);
        for (long long j = 1; j <= 5; ++j) {
            SignedProfile hi = xi, lo = xi;
            hi.add(j, h);
            lo.add(j, -h);
            const double fd = (eval_(hi) - eval_(lo)) / (2.0 * h);
            const double an = grad_(xi, j);
            const double scale = std::max({1.0, std::abs(fd), std::abs(an)});
            if (std::abs(fd - an) > 1e-6 * scale)
                throw std::invalid_argument(
                    "DifferentiableFunctional: gradient disagrees with finite differences");
        }
    }
}

double centered_generator_apply(const DifferentiableFunctional& f, const SignedProfile& xi,
                                double s, double rhoB) {
    if (!(s >= 0.0 && s < 1.0))
        throw std::invalid_argument("centered_generator_apply: s must lie in [0,1)");
    const double f0 = f(xi);

    SignedProfile birth = xi;
    birth.add(1, 1.0);
    double acc = rhoB / (1.0 - s) * (f(birth) - f0);

    // Drift correction: -rhoB sum_j s^{j-1} f'(xi)[delta_j].
    const double scale = std::max(1.0, f.bound());
    double power = 1.0; // s^{j-1}
    for (long long j = 1; j <= 1 << 20; ++j) {
        acc -= rhoB * power * f.grad(xi, j);
        power *= s;
        if (power * scale < 1e-14) break;
    }

    // Hop terms: sites carried by xi plus those reached by the geometric
    // weight rhoB s^j.
    long long j_geom = 1;
    {
        double pj = s;
        while (pj * scale >= 1e-14 && j_geom < 1024) {
            pj *= s;
            ++j_geom;
        }
    }
    const long long j_hi = std::max(j_geom, xi.max_support());
    double sj = s; // s^j
    for (long long j = 1; j <= j_hi; ++j) {
        const double w = static_cast<double>(j) * xi.at(j) + rhoB * sj;
        if (w != 0.0) {
            SignedProfile hop = xi;
            hop.add(j, -1.0);
            hop.add(j + 1, 1.0);
            acc += w / (1.0 - s) * (f(hop) - f0);
        }
        sj *= s;
    }
    return acc;
}

NegativeBinomial particle_step_law(long long j, double s, double t) {
    if (j < 1) throw std::invalid_argument("particle_step_law: j must be >= 1");
    if (!(0.0 <= s && s <= t && t < 1.0))
        throw std::invalid_argument("particle_step_law: need 0 <= s <= t < 1");
    return NegativeBinomial{static_cast<double>(j), (t - s) / (1.0 - s)};
}

} // namespace polyasim
