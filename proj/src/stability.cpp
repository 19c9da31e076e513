#include "thinfilm/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "thinfilm/errors.hpp"
#include "thinfilm/oscillator.hpp"
#include "thinfilm/potentials.hpp"
#include "thinfilm/quadrature.hpp"
#include "thinfilm/spectral.hpp"

namespace thinfilm {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> centred_gradient(const Profile& h) {
    const std::size_t n = h.size();
    const double dx = h.spacing();
    std::vector<double> g(n);
    if (h.periodic) {
        for (std::size_t j = 0; j < n; ++j) g[j] = (h.ys[(j + 1) % n] - h.ys[(j + n - 1) % n]) / (2.0 * dx);
        return g;
    }
    for (std::size_t j = 1; j + 1 < n; ++j) g[j] = (h.ys[j + 1] - h.ys[j - 1]) / (2.0 * dx);
    g[0] = (-3.0 * h.ys[0] + 4.0 * h.ys[1] - h.ys[2]) / (2.0 * dx);
    g[n - 1] = (3.0 * h.ys[n - 1] - 4.0 * h.ys[n - 2] + h.ys[n - 3]) / (2.0 * dx);
    return g;
}

std::vector<double> gradient_of(const Profile& h) {
    if (h.dys.size() == h.size()) return h.dys;
    if (h.periodic && h.min() > 0.0) return spectral_derivative(h.ys, h.length, 1);
    return centred_gradient(h);
}

double integrate(const Profile& grid, const std::vector<double>& f) {
    return grid.periodic ? periodic_integral(f, grid.length) : interval_integral(f, grid.length);
}

void require_same_grid(const Profile& h, const Profile& u) {
    if (!h.periodic || !u.periodic) throw ValidationError("variations need periodic profiles");
    if (h.size() != u.size() || std::abs(h.length - u.length) > 1e-12 * h.length) {
        throw ValidationError("perturbation must share the steady state's grid");
    }
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

Profile on_grid(const Profile& like, std::vector<double> ys, std::string meta) {
    Profile p = Profile::periodic_grid(like.length, like.size(), std::move(meta));
    p.ys = std::move(ys);
    return p;
}

Profile negated(Profile p) {
    for (double& v : p.ys) v = -v;
    return p;
}

/// Tiles j copies of a periodic profile.
Profile tiled(const Profile& p, int j) {
    if (j == 1) return p;
    Profile out = Profile::periodic_grid(p.length * j, p.size() * static_cast<std::size_t>(j), p.meta);
    for (int c = 0; c < j; ++c) {
        std::copy(p.ys.begin(), p.ys.end(), out.ys.begin() + static_cast<std::ptrdiff_t>(c * p.size()));
        if (p.dys.size() == p.size()) out.dys.insert(out.dys.end(), p.dys.begin(), p.dys.end());
    }
    return out;
}

Witness make_witness(const Profile& h, Profile u, const OscillatorParams& params, std::string label) {
    // remove round-off mean
    double mean = 0.0;
    for (double v : u.ys) mean += v;
    mean /= static_cast<double>(u.size());
    for (double& v : u.ys) v -= mean;
    Witness w;
    w.label = label;
    w.variations = variations(h, u, params, label);
    w.direction = std::move(u);
    return w;
}

}  // namespace

double energy(const Profile& h, const OscillatorParams& params, Normalization norm) {
    params.validate();
    if (h.size() < 3) throw ValidationError("energy needs at least 3 samples");
    const double q = params.q;
    const std::vector<double> g = gradient_of(h);
    std::vector<double> f(h.size());
    for (std::size_t j = 0; j < h.size(); ++j) {
        const double y = h.ys[j];
        if (y < 0.0) throw DomainError("energy of a profile with negative heights");
        const double phi = norm == Normalization::H ? eval_H(y, q) : eval_G(y, q);
        f[j] = 0.5 * g[j] * g[j] - params.bond * phi;
    }
    return integrate(h, f);
}

double droplet_energy(const DropletState& d, Normalization norm) {
    const OscillatorParams& params = d.params;
    const GaussLegendreRule& rule = gauss_legendre(20);
    const std::vector<double> bp = graded_breakpoints(0.0, d.X_hat, 4, 0.15);
    std::vector<double> xs, ws;
    for (std::size_t p = 0; p + 1 < bp.size(); ++p) {
        const double mid = 0.5 * (bp[p] + bp[p + 1]);
        const double half = 0.5 * (bp[p + 1] - bp[p]);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            xs.push_back(d.offset + mid + half * rule.nodes[i]);
            ws.push_back(half * rule.weights[i]);
        }
    }
    std::vector<double> h, dh;
    droplet_samples(d, xs, h, dh);
    double sum = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double phi = norm == Normalization::H ? eval_H(h[j], params.q) : eval_G(h[j], params.q);
        sum += ws[j] * (0.5 * dh[j] * dh[j] - params.bond * phi);
    }
    return sum;
}

VariationReport variations(const Profile& h, const Profile& u, const OscillatorParams& params, std::string label) {
    params.validate();
    require_same_grid(h, u);
    const double umax = max_abs(u.ys);
    double umean = 0.0;
    for (double v : u.ys) umean += v;
    umean /= static_cast<double>(u.size());
    if (std::abs(umean) > 1e-9 * std::max(umax, 1e-300)) {
        throw ValidationError("perturbation direction must have zero mean");
    }
    const double q = params.q;
    const double B = params.bond;
    const std::vector<double> hp = gradient_of(h);
    const std::vector<double> hpp = spectral_derivative(hp, h.length, 1);
    const std::vector<double> up = spectral_derivative(u.ys, u.length, 1);

    const std::size_t n = h.size();
    std::vector<double> f1(n), f2(n), f3(n), f4(n), s2(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double y = h.ys[j];
        const double uj = u.ys[j];
        const double r = eval_r(y, q);
        f1[j] = -(hpp[j] + B * eval_H_prime(y, q)) * uj;
        f2[j] = up[j] * up[j] - B * r * uj * uj;
        f3[j] = -B * eval_r_prime(y, q) * uj * uj * uj;
        f4[j] = -B * eval_r_second(y, q) * uj * uj * uj * uj;
        s2[j] = up[j] * up[j] + B * std::abs(r) * uj * uj;
    }
    VariationReport v;
    v.d1 = periodic_integral(f1, h.length);
    v.d2 = periodic_integral(f2, h.length);
    v.d3 = periodic_integral(f3, h.length);
    v.d4 = periodic_integral(f4, h.length);
    v.scale2 = periodic_integral(s2, h.length);
    v.label = std::move(label);
    return v;
}

bool unstable_sign_pattern(const VariationReport& v, double rel_zero) {
    const double z2 = rel_zero * v.scale2;
    if (v.d2 < -z2) return true;
    if (v.d2 > z2) return false;
    const double scale34 = std::max({std::abs(v.d3), std::abs(v.d4), 1e-300});
    if (v.d3 < -rel_zero * scale34) return true;
    if (v.d3 > rel_zero * scale34) return false;
    return v.d4 < 0.0;
}

std::string verdict_name(VerdictKind k) {
    switch (k) {
    case VerdictKind::EnergyUnstable: return "energy_unstable";
    case VerdictKind::EnergyStable: return "energy_stable";
    case VerdictKind::NeutralFamily: return "neutral_family";
    case VerdictKind::LocalMinimum: return "local_minimum";
    case VerdictKind::Undetermined: return "undetermined";
    }
    return "undetermined";
}

Tau1Result tau1(const Profile& h, const OscillatorParams& params, Discretization disc, bool even_only) {
    params.validate();
    if (!h.periodic) throw ValidationError("tau1 needs a periodic profile");
    const std::size_t n = h.size();
    if (n < 64) throw ValidationError("tau1 needs at least 64 grid points");
    if (n % 2 != 0) throw ValidationError("tau1 needs an even number of grid points");

    Eigen::MatrixXd M = disc == Discretization::Spectral ? spectral_d2_matrix(n, h.length)
                                                          : fd_d2_matrix(n, h.length);
    M = -M;
    double rmax = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double r = params.bond * eval_r(h.ys[j], params.q);
        M(j, j) -= r;
        rmax = std::max(rmax, std::abs(r));
    }
    // Restrict to zero mean: P M P plus a large multiple of the constant projector.
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
    const Eigen::MatrixXd Pm = Eigen::MatrixXd::Identity(n, n) - ones;
    const double kmax = kPi * static_cast<double>(n) / h.length;
    const double sigma = 10.0 * (kmax * kmax + rmax) + 1.0;
    Eigen::MatrixXd Mz = Pm * M * Pm + sigma * ones;
    Mz = 0.5 * (Mz + Mz.transpose());

    Eigen::VectorXd vec;
    double lambda;
    if (even_only) {
        // orthonormal basis of grid functions even about x = 0
        const std::size_t m = n / 2 + 1;
        Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, m);
        V(0, 0) = 1.0;
        V(n / 2, m - 1) = 1.0;
        for (std::size_t j = 1; j < n / 2; ++j) {
            V(j, j) = std::sqrt(0.5);
            V(n - j, j) = std::sqrt(0.5);
        }
        const Eigen::MatrixXd Me = V.transpose() * Mz * V;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Me);
        if (es.info() != Eigen::Success) throw NumericalError("tau1: eigensolver failed");
        lambda = es.eigenvalues()(0);
        vec = V * es.eigenvectors().col(0);
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Mz);
        if (es.info() != Eigen::Success) throw NumericalError("tau1: eigensolver failed");
        lambda = es.eigenvalues()(0);
        vec = es.eigenvectors().col(0);
    }
    if (lambda > 0.5 * sigma) throw NumericalError("tau1: deflation shift too small");

    Tau1Result out;
    out.tau1 = lambda;
    out.eigenfunction = Profile::periodic_grid(h.length, n, "tau1_eigenfunction");
    const double norm = 1.0 / std::sqrt(h.spacing());
    const double mean = vec.mean();
    // fix the sign so the eigenfunction is positive at x = 0 (or its first nonzero sample)
    double sgn = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(vec(j) - mean) > 1e-8) {
            sgn = vec(j) - mean > 0.0 ? 1.0 : -1.0;
            break;
        }
    }
    for (std::size_t j = 0; j < n; ++j) out.eigenfunction.ys[j] = sgn * norm * (vec(j) - mean);
    return out;
}

StabilityVerdict classify(const SteadyState& ss, const ClassifyOptions& opt) {
    StabilityVerdict v;
    v.neumann = opt.neumann;

    if (const auto* c = std::get_if<ConstantState>(&ss)) {
        const OscillatorParams& params = c->params;
        params.validate();
        const double X = opt.at_period.value_or(c->X);
        v.X = X;
        const double r = params.bond * eval_r(c->hbar, params.q);
        v.tau1 = std::pow(2.0 * kPi / X, 2) - r;
        v.mu1 = X * X * v.tau1;
        const ConstantState at{params, c->hbar, X};
        const Profile h = sample_on_periodic_grid(at, opt.npoints);
        std::vector<double> cs(opt.npoints), sn(opt.npoints);
        const double amp = std::sqrt(2.0 / X);
        for (std::size_t j = 0; j < opt.npoints; ++j) {
            cs[j] = amp * std::cos(2.0 * kPi * h.xs[j] / X);
            sn[j] = amp * std::sin(2.0 * kPi * h.xs[j] / X);
        }
        v.eigenfunction = on_grid(h, cs, "cos");
        auto add_trig_witnesses = [&] {
            v.witnesses.push_back(make_witness(h, on_grid(h, cs, "cos"), params, "cos(2 pi x/X)"));
            v.witnesses.push_back(make_witness(h, negated(on_grid(h, cs, "-cos")), params, "-cos(2 pi x/X)"));
            if (!opt.neumann) {
                v.witnesses.push_back(make_witness(h, on_grid(h, sn, "sin"), params, "sin(2 pi x/X)"));
                v.witnesses.push_back(make_witness(h, negated(on_grid(h, sn, "-sin")), params, "-sin(2 pi x/X)"));
            }
        };
        const double lhs = r * X * X;
        const double four_pi_sq = 4.0 * kPi * kPi;
        const double rel = (lhs - four_pi_sq) / four_pi_sq;
        const double r2 = eval_r_second(c->hbar, params.q);
        if (rel > 1e-10) {
            v.kind = VerdictKind::EnergyUnstable;
            v.theorem = "constant state with r(hbar) X^2 > 4 pi^2: energy unstable along sin and cos";
            add_trig_witnesses();
        } else if (rel < -1e-10) {
            v.kind = VerdictKind::LocalMinimum;
            v.theorem = "constant state with r(hbar) X^2 < 4 pi^2: strict local energy minimum";
        } else if (r2 > 0.0) {
            v.kind = VerdictKind::EnergyUnstable;
            v.theorem = "constant state with r(hbar) X^2 = 4 pi^2 and r'' > 0: energy unstable along sin and cos";
            add_trig_witnesses();
        } else if (r2 < 0.0) {
            v.kind = VerdictKind::EnergyStable;
            v.theorem = "constant state with r(hbar) X^2 = 4 pi^2 and r'' < 0: energy stable";
        } else if (std::abs(params.q - 1.0) < 1e-12) {
            v.kind = VerdictKind::NeutralFamily;
            v.theorem = "q = 1 constant state at r(hbar) X^2 = 4 pi^2: member of a neutral family";
        } else {
            v.kind = VerdictKind::Undetermined;
            v.theorem = "constant state at r(hbar) X^2 = 4 pi^2 with r'' = 0: no result";
        }
        return v;
    }

    if (std::holds_alternative<DropletState>(ss) || std::holds_alternative<DropletConfiguration>(ss)) {
        v.kind = VerdictKind::Undetermined;
        v.theorem = "no energy stability result for droplet steady states";
        return v;
    }

    const auto& ps = std::get<PeriodicState>(ss);
    const OscillatorParams& params = ps.params;
    const double q = params.q;
    int j = 1;
    if (opt.at_period) {
        const double ratio = *opt.at_period / ps.X;
        j = static_cast<int>(std::lround(ratio));
        if (j < 1 || std::abs(ratio - j) > 1e-9 * ratio) {
            throw ValidationError("analysis period must be an integer multiple of the least period");
        }
    }
    const Profile base = sample_on_periodic_grid(ss, opt.npoints);
    const Profile h = tiled(base, j);
    v.X = h.length;

    const Tau1Result t = tau1(h, params, Discretization::Spectral, opt.neumann);
    v.tau1 = t.tau1;
    v.mu1 = v.X * v.X * t.tau1;
    v.eigenfunction = t.eigenfunction;
    double rmax = 0.0;
    for (double y : h.ys) rmax = std::max(rmax, params.bond * std::abs(eval_r(y, q)));
    const double tau_scale = std::pow(2.0 * kPi / v.X, 2) + rmax;

    if (t.tau1 < -opt.tau_tol * tau_scale) {
        v.kind = VerdictKind::EnergyUnstable;
        v.theorem = "negative Rayleigh eigenvalue: linear instability implies energy instability";
        v.witnesses.push_back(make_witness(h, t.eigenfunction, params, "tau1 eigenfunction"));
        return v;
    }

    const std::vector<double> hp = gradient_of(h);
    const std::vector<double> hpp = spectral_derivative(hp, h.length, 1);

    if (std::abs(q - 1.0) < 1e-12) {
        v.kind = VerdictKind::NeutralFamily;
        v.theorem = "q = 1: one-parameter family of equal-energy steady states, not asymptotically stable";
        return v;
    }
    if (q < 1.0 || q > 2.0) {
        v.kind = VerdictKind::EnergyUnstable;
        v.theorem = "power law with q outside [1, 2]: second variation negative along h''";
        v.witnesses.push_back(make_witness(h, on_grid(h, hpp, "h''"), params, "h''"));
        v.witnesses.push_back(make_witness(h, negated(on_grid(h, hpp, "-h''")), params, "-h''"));
        if (!opt.neumann) v.witnesses.push_back(make_witness(h, on_grid(h, hp, "h'"), params, "h'"));
        return v;
    }
    if (std::abs(q - 2.0) < 1e-12) {
        v.kind = VerdictKind::EnergyUnstable;
        v.theorem = "q = 2: second variation zero and third variation negative along -h''";
        v.witnesses.push_back(make_witness(h, negated(on_grid(h, hpp, "-h''")), params, "-h''"));
        return v;
    }

    const AlphaDerivatives d = alpha_derivatives(ps.alpha, q);
    v.dE = d.dE;
    if (std::abs(d.dE) < opt.dE_rel_tol * std::abs(ps.maps.E)) {
        v.kind = VerdictKind::Undetermined;
        v.theorem = "1 < q < 2 with E'(alpha) = 0: no energy stability result";
        return v;
    }
    if (d.dE < 0.0) {
        v.kind = VerdictKind::EnergyStable;
        v.theorem = "1 < q < 2 with E'(alpha) < 0: energy stable";
        v.note = "energy stability does not assert a local energy minimum";
        return v;
    }
    v.kind = VerdictKind::EnergyUnstable;
    v.theorem = "1 < q < 2 with E'(alpha) > 0: second variation negative along kappa_alpha(x/X)";
    const Profile kap = kappa_direction(ps.alpha, q, opt.npoints);
    std::vector<double> ys;
    for (int c = 0; c < j; ++c) ys.insert(ys.end(), kap.ys.begin(), kap.ys.end());
    v.witnesses.push_back(make_witness(h, on_grid(h, ys, "kappa"), params, "kappa_alpha(x/X)"));
    for (double& y : ys) y = -y;
    v.witnesses.push_back(make_witness(h, on_grid(h, ys, "-kappa"), params, "-kappa_alpha(x/X)"));
    return v;
}

OddPerturbationCheck odd_perturbation_check(const Profile& h, const Profile& u, const OscillatorParams& params) {
    require_same_grid(h, u);
    OddPerturbationCheck c;
    const std::size_t n = u.size();
    const double umax = max_abs(u.ys);
    bool odd = umax > 0.0;
    for (std::size_t j = 0; j < n && odd; ++j) {
        odd = std::abs(u.ys[j] + u.ys[(n - j) % n]) <= 1e-12 * umax;
    }
    Profile sum = Profile::periodic_grid(h.length, n, "h+u");
    bool positive = true;
    for (std::size_t j = 0; j < n; ++j) {
        sum.ys[j] = h.ys[j] + u.ys[j];
        positive = positive && sum.ys[j] > 0.0;
    }
    c.applicable = params.q > 1.0 && params.q < 2.0 && odd && positive;
    if (!positive) return c;
    Profile hh = h;
    hh.dys.clear();
    c.energy_change = energy(sum, params) - energy(hh, params);
    c.energy_increases = c.energy_change > 0.0;
    return c;
}

}  // namespace thinfilm
