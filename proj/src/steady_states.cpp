#include "thinfilm/steady_states.hpp"

#include <algorithm>
#include <numeric>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "thinfilm/errors.hpp"
#include "thinfilm/potentials.hpp"

namespace thinfilm {

namespace {

constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

bool is_linear(double q) { return std::abs(q - 1.0) < 1e-12; }

void fill_periodic_profile(PeriodicState& s, std::size_t npoints) {
    s.profile = Profile::periodic_grid(s.X, npoints, "periodic");
    const double scale = s.maps.P / s.X;
    std::vector<double> xs(npoints), k, dk;
    for (std::size_t j = 0; j < npoints; ++j) xs[j] = scale * s.profile.xs[j];
    sample_k(s.alpha, s.params.q, xs, k, dk);
    for (std::size_t j = 0; j < npoints; ++j) {
        s.profile.ys[j] = s.amplitude * k[j];
        s.profile.dys.push_back(s.amplitude * scale * dk[j]);
    }
}

}  // namespace

std::string kind_name(const SteadyState& s) {
    switch (s.index()) {
    case 0: return "constant";
    case 1: return "periodic";
    case 2: return "droplet";
    default: return "droplet_configuration";
    }
}

PeriodicState rescale_to_physical(double alpha, const OscillatorParams& params, const RescaleTarget& target,
                                  std::size_t npoints) {
    params.validate();
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("rescale_to_physical requires alpha in (0, 1)");
    if (npoints < 16) throw ValidationError("periodic profile needs at least 16 points");
    const double q = params.q;
    const double B = params.bond;

    PeriodicState s;
    s.params = params;
    s.alpha = alpha;
    s.maps = period_area(alpha, q);
    const double P = s.maps.P;
    const double A = s.maps.A;
    const bool log_branch = branch_of(q) == Branch::Log;

    if (target.D) {
        const double D = *target.D;
        if (!std::isfinite(D)) throw ValidationError("D must be finite");
        if (log_branch) {
            s.amplitude = std::exp(D / B);
            s.X = P * std::exp(D / (2.0 * B)) / std::sqrt(B);
        } else {
            if (!(D > 0.0)) throw ValidationError("D must be positive for q != 0");
            s.amplitude = std::pow(D / B, 1.0 / q);
            s.X = P * std::pow(D / B, 1.0 / (2.0 * q)) / std::sqrt(D);
        }
        s.D = D;
        s.A_ss = s.amplitude * A * s.X / P;
    } else {
        if (!target.X || !target.A_ss) throw ValidationError("rescale target needs D or both X and A_ss");
        s.X = *target.X;
        s.A_ss = *target.A_ss;
        if (!(s.X > 0.0) || !(s.A_ss > 0.0)) throw ValidationError("X and A_ss must be positive");
        s.amplitude = (s.A_ss / A) * (P / s.X);
        s.D = log_branch ? B * std::log(s.amplitude) : B * std::pow(s.amplitude, q);
    }

    const double lhs = B * std::pow(s.X, 3.0 - q) * std::pow(s.A_ss, q - 1.0);
    s.invariance_residual = std::abs(lhs - s.maps.E) / s.maps.E;
    if (s.invariance_residual > kInvarianceTol) {
        throw ValidationError("(alpha, X, A_ss) violates the invariance relation: relative residual " +
                              std::to_string(s.invariance_residual));
    }
    s.degenerate_family = is_linear(q);
    fill_periodic_profile(s, npoints);
    return s;
}

std::vector<double> normalize_to_canonical(const PeriodicState& s) {
    std::vector<double> k(s.profile.ys);
    for (double& v : k) v /= s.amplitude;
    return k;
}

PeriodicSearch construct_periodic(const OscillatorParams& params, double X, double A_ss, std::size_t npoints) {
    params.validate();
    if (!(X > 0.0) || !(A_ss > 0.0)) throw ValidationError("X and A_ss must be positive");
    const double q = params.q;
    PeriodicSearch out;
    out.target_E = params.bond * std::pow(X, 3.0 - q) * std::pow(A_ss, q - 1.0);
    const double T = out.target_E;
    RescaleTarget tgt{std::nullopt, X, A_ss};

    if (is_linear(q)) {
        out.degenerate_family = true;
        if (std::abs(T - kFourPiSq) <= 1e-10 * kFourPiSq) {
            out.warnings.push_back("q = 1: every alpha in (0,1) is a steady state; returning alpha = 0.5");
            out.states.push_back(rescale_to_physical(0.5, params, tgt, npoints));
        }
        return out;
    }

    // Scan E on a grid, refine interior extrema, then root-find on each monotone piece.
    const bool zero_ok = q > -1.0 + 1e-12;
    const int n_scan = 64;
    std::vector<double> a, e;
    a.push_back(zero_ok ? 0.0 : 1e-4);
    for (int i = 1; i < n_scan; ++i) a.push_back(static_cast<double>(i) / n_scan);
    for (double v : a) e.push_back(E_of_alpha(v, q));
    a.push_back(1.0);
    e.push_back(kFourPiSq);

    auto E = [q](double al) { return al >= 1.0 ? kFourPiSq : E_of_alpha(al, q); };
    std::vector<double> cuts{a.front()};
    std::vector<double> cut_vals{e.front()};
    for (std::size_t i = 1; i + 1 < a.size(); ++i) {
        const bool is_min = e[i] < e[i - 1] && e[i] < e[i + 1];
        const bool is_max = e[i] > e[i - 1] && e[i] > e[i + 1];
        if (!is_min && !is_max) continue;
        const double sign = is_min ? 1.0 : -1.0;
        auto f = [&](double al) { return sign * E(al); };
        std::uintmax_t iters = 200;
        const auto [al, fv] = boost::math::tools::brent_find_minima(f, a[i - 1], a[i + 1], 40, iters);
        cuts.push_back(al);
        cut_vals.push_back(sign * fv);
        if (is_min && !out.alpha_crit) {
            out.alpha_crit = al;
            out.E_min = sign * fv;
        }
    }
    cuts.push_back(1.0);
    cut_vals.push_back(kFourPiSq);

    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        const double fa = cut_vals[p] - T;
        const double fb = cut_vals[p + 1] - T;
        double root;
        if (fa == 0.0) {
            root = cuts[p];
        } else if (fa * fb < 0.0) {
            auto g = [&](double al) { return E(al) - T; };
            boost::math::tools::eps_tolerance<double> tol(45);
            std::uintmax_t iters = 200;
            const auto [lo, hi] = boost::math::tools::toms748_solve(g, cuts[p], cuts[p + 1], fa, fb, tol, iters);
            root = 0.5 * (lo + hi);
        } else {
            continue;
        }
        if (!(root > 0.0 && root < 1.0)) continue;
        out.states.push_back(rescale_to_physical(root, params, tgt, npoints));
    }
    return out;
}

void droplet_samples(const DropletState& d, const std::vector<double>& xs, std::vector<double>& h,
                     std::vector<double>& dh) {
    const double scale = d.maps0.P / d.X_hat;
    std::vector<double> can(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) can[j] = scale * (xs[j] - d.offset);
    sample_k0(d.params.q, can, h, dh);
    for (std::size_t j = 0; j < xs.size(); ++j) {
        h[j] *= d.amplitude;
        dh[j] *= d.amplitude * scale;
    }
}

std::vector<double> droplet_values(const DropletState& d, const std::vector<double>& xs) {
    std::vector<double> h, dh;
    droplet_samples(d, xs, h, dh);
    return h;
}

DropletState droplet_with_length(const OscillatorParams& params, double A_hat, double X_hat,
                                 std::size_t n_intervals) {
    params.validate();
    const double q = params.q;
    if (!(q > -1.0)) throw DomainError("zero-angle droplets exist only for q > -1");
    if (!(A_hat > 0.0) || !(X_hat > 0.0)) throw ValidationError("droplet area and length must be positive");
    if (n_intervals < 16) throw ValidationError("droplet profile needs at least 16 intervals");

    DropletState d;
    d.params = params;
    d.maps0 = period_area(0.0, q);
    d.A_hat = A_hat;
    d.X_hat = X_hat;
    d.amplitude = (A_hat / d.maps0.A) * (d.maps0.P / X_hat);

    const Profile k0 = profile_k0(q, n_intervals);
    const double scale = d.maps0.P / X_hat;
    d.profile = Profile::interval_grid(X_hat, n_intervals, "droplet");
    d.profile.dys.resize(k0.size());
    for (std::size_t j = 0; j < k0.size(); ++j) {
        d.profile.ys[j] = d.amplitude * k0.ys[j];
        d.profile.dys[j] = d.amplitude * scale * k0.dys[j];
    }
    // Slope at the contact points from the first integral (1/2)k'^2 + H(k) = H(beta_0), H(0) = 0.
    d.endpoint_slope = d.amplitude * scale * std::sqrt(2.0 * std::abs(eval_H(d.maps0.beta, q)));
    double max_slope = 0.0;
    for (double v : d.profile.dys) max_slope = std::max(max_slope, std::abs(v));
    if (d.endpoint_slope > 1e-6 * max_slope) {
        throw NumericalError("droplet contact angle is not zero to tolerance");
    }
    return d;
}

DropletState construct_droplet(const OscillatorParams& params, double A_ss, std::size_t n_intervals) {
    params.validate();
    const double q = params.q;
    if (!(q > -1.0)) throw DomainError("zero-angle droplets exist only for q > -1");
    if (!(q < 3.0)) throw DomainError("droplet construction by length formula requires q < 3");
    if (3.0 - q < 1e-3) throw DomainError("droplet length formula is ill-conditioned for |3 - q| < 1e-3");
    if (!(A_ss > 0.0)) throw ValidationError("droplet area must be positive");
    const double E0 = period_area(0.0, q).E;
    const double X_hat = std::pow(E0 / (params.bond * std::pow(A_ss, q - 1.0)), 1.0 / (3.0 - q));
    return droplet_with_length(params, A_ss, X_hat, n_intervals);
}

DropletExistence droplet_exists(const OscillatorParams& params, double hbar, double X) {
    params.validate();
    if (!(hbar > 0.0) || !(X > 0.0)) throw ValidationError("hbar and X must be positive");
    const double q = params.q;
    DropletExistence r;
    r.lhs = params.bond * std::pow(hbar, q - 1.0) * X * X;
    if (q <= -1.0 + 1e-12) {
        r.reason = "zero-angle droplets require q > -1";
        return r;
    }
    r.E0 = period_area(0.0, q).E;
    const double rel = (r.lhs - r.E0) / r.E0;
    if (std::abs(q - 3.0) < 1e-12) {
        r.exists = std::abs(rel) <= 1e-9;
        r.reason = r.exists ? "q = 3 and bond hbar^2 X^2 = E(0): droplets of every length up to X"
                            : "q = 3 requires bond hbar^2 X^2 = E(0)";
        return r;
    }
    r.exists = q < 3.0 ? rel >= -1e-12 : rel <= 1e-12;
    r.reason = r.exists ? "bond hbar^(q-1) X^2 on the admissible side of E(0)"
                        : "bond hbar^(q-1) X^2 on the wrong side of E(0)";
    if (r.exists) {
        r.X_hat = std::pow(r.E0 / (params.bond * std::pow(hbar * X, q - 1.0)), 1.0 / (3.0 - q));
    }
    return r;
}

DropletConfiguration assemble_configuration(double X, std::vector<DropletState> droplets,
                                            const std::vector<double>& offsets) {
    if (!(X > 0.0)) throw ValidationError("container length must be positive");
    if (droplets.size() != offsets.size()) throw ValidationError("one offset per droplet required");
    for (std::size_t i = 0; i < droplets.size(); ++i) droplets[i].offset = offsets[i];
    std::sort(droplets.begin(), droplets.end(),
              [](const DropletState& a, const DropletState& b) { return a.offset < b.offset; });
    const double slack = 1e-12 * X;
    double end = 0.0;
    for (const DropletState& d : droplets) {
        if (d.offset < end - slack) throw ValidationError("droplet supports overlap or leave the container");
        end = d.offset + d.X_hat;
    }
    if (end > X + slack) throw ValidationError("droplet extends past the container");
    return DropletConfiguration{X, std::move(droplets)};
}

Profile sample_on_periodic_grid(const SteadyState& s, std::size_t n) {
    if (n < 4) throw ValidationError("grid needs at least 4 points");
    if (const auto* c = std::get_if<ConstantState>(&s)) {
        Profile p = Profile::periodic_grid(c->X, n, "constant");
        std::fill(p.ys.begin(), p.ys.end(), c->hbar);
        p.dys.assign(n, 0.0);
        return p;
    }
    if (const auto* ps = std::get_if<PeriodicState>(&s)) {
        if (ps->profile.size() == n) return ps->profile;
        PeriodicState copy = *ps;
        fill_periodic_profile(copy, n);
        return copy.profile;
    }
    if (const auto* d = std::get_if<DropletState>(&s)) {
        Profile p = Profile::periodic_grid(d->X_hat, n, "droplet");
        p.ys = droplet_values(*d, p.xs);
        return p;
    }
    const auto& cfg = std::get<DropletConfiguration>(s);
    Profile p = Profile::periodic_grid(cfg.X, n, "droplet_configuration");
    for (const DropletState& d : cfg.droplets) {
        const std::vector<double> v = droplet_values(d, p.xs);
        for (std::size_t j = 0; j < n; ++j) p.ys[j] += v[j];
    }
    return p;
}

std::vector<double> state_values(const SteadyState& s, double domain, const std::vector<double>& xs) {
    auto wrap = [](double x, double period) {
        const double r = std::fmod(x, period);
        return r < 0.0 ? r + period : r;
    };
    std::vector<double> out(xs.size(), 0.0);
    if (const auto* c = std::get_if<ConstantState>(&s)) {
        std::fill(out.begin(), out.end(), c->hbar);
        return out;
    }
    if (const auto* ps = std::get_if<PeriodicState>(&s)) {
        const double scale = ps->maps.P / ps->X;
        std::vector<std::size_t> order(xs.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::vector<double> can(xs.size());
        for (std::size_t j = 0; j < xs.size(); ++j) can[j] = scale * wrap(xs[j], ps->X);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return can[a] < can[b]; });
        std::vector<double> sorted(xs.size()), k, dk;
        for (std::size_t j = 0; j < xs.size(); ++j) sorted[j] = can[order[j]];
        sample_k(ps->alpha, ps->params.q, sorted, k, dk);
        for (std::size_t j = 0; j < xs.size(); ++j) out[order[j]] = ps->amplitude * k[j];
        return out;
    }
    std::vector<double> wrapped(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) wrapped[j] = wrap(xs[j], domain);
    auto add_droplet = [&](const DropletState& d) {
        // a support may straddle the container end
        for (double shift : {0.0, domain}) {
            std::vector<double> moved(wrapped);
            for (double& x : moved) x += shift;
            const std::vector<double> v = droplet_values(d, moved);
            for (std::size_t j = 0; j < xs.size(); ++j) out[j] += v[j];
        }
    };
    if (const auto* d = std::get_if<DropletState>(&s)) {
        add_droplet(*d);
        return out;
    }
    for (const DropletState& d : std::get<DropletConfiguration>(s).droplets) add_droplet(d);
    return out;
}

}  // namespace thinfilm
