// Acceptance battery: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "thinfilm/energy_levels.hpp"
#include "thinfilm/oscillator.hpp"
#include "thinfilm/pde_solver.hpp"
#include "thinfilm/stability.hpp"
#include "thinfilm/steady_states.hpp"

using namespace thinfilm;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPiSq = 4.0 * kPi * kPi;

// Collects failures with a short reason; the first few are printed.
struct Check {
    int failures = 0;
    std::vector<std::string> notes;
    void expect(bool ok, const std::string& what) {
        if (ok) return;
        ++failures;
        if (notes.size() < 4) notes.push_back(what);
    }
    void expect_close(double got, double want, double tol, const std::string& what) {
        std::ostringstream os;
        os << what << ": got " << got << ", want " << want << " +- " << tol;
        expect(std::abs(got - want) <= tol, os.str());
    }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

PeriodicState unit_D(double q, double alpha, std::size_t N = 256) {
    return rescale_to_physical(alpha, OscillatorParams::canonical(q, 1.0), {1.0, std::nullopt, std::nullopt}, N);
}

// ---- 1 ----
std::string limits(Check& c) {
    double worst_pa = 0.0, worst_e = 0.0;
    for (double q : {-3.0, -1.0, 0.0, 0.5, 1.5, 2.0, 2.5, 3.5}) {
        const AlphaMaps m = period_area(0.9999, q);
        worst_pa = std::max({worst_pa, std::abs(m.P - 2 * kPi), std::abs(m.A - 2 * kPi)});
        worst_e = std::max(worst_e, std::abs(m.E - kFourPiSq));
    }
    c.expect(worst_pa < 1e-2, "P or A off 2 pi");
    c.expect(worst_e < 5e-2, "E off 4 pi^2");
    return fmt("max |P-2pi|,|A-2pi| = %.2e, max |E-4pi^2| = %.2e", worst_pa, worst_e);
}

// ---- 2 ----
std::string linear_case(Check& c) {
    double worst = 0.0;
    for (int i = 1; i <= 9; ++i) {
        const double a = 0.1 * i;
        const AlphaMaps m = period_area(a, 1.0);
        worst = std::max({worst, std::abs(m.P - 2 * kPi), std::abs(m.A - 2 * kPi), std::abs(F_of_alpha(a, 1.0))});
    }
    c.expect(worst < 1e-10, "q = 1 not exact");
    return fmt("max deviation %.2e", worst);
}

// ---- 3 ----
std::string beta_forms(Check& c) {
    double worst = 0.0;
    for (double q : {0.5, 1.0, 1.5, 2.0, 2.5}) {
        const double e = E_of_alpha(0.0, q), cf = E0_closed_form(q);
        worst = std::max(worst, std::abs(e - cf) / cf);
    }
    c.expect(worst < 1e-6, "E(0) quadrature vs closed form");
    double jmax = 0.0;
    for (int i = 1; i <= 750; ++i) {
        const double J = J_of_q(1.0 + i * 1e-3);
        c.expect(J < 4.0, fmt("J(%.3f) >= 4", 1.0 + i * 1e-3));
        jmax = std::max(jmax, J);
    }
    c.expect_close(jmax, 1.04, 0.05, "max J");
    const JBounds b = J_bounds();
    c.expect_close(b.low_interval, 3.17, 0.02, "J bound on (1, 1.5]");
    c.expect_close(b.high_interval, 1.73, 0.02, "J bound on (1.5, 1.75]");
    return fmt("E(0) rel %.1e; max J %.4f; bounds %.4f", worst, jmax, b.low_interval) + fmt(", %.4f", b.high_interval);
}

// ---- 4 ----
std::string q_zero(Check& c) {
    const double A0 = period_area(0.0, 0.0).A;
    const double A0_exact = 2.0 * std::exp(1.5) * std::sqrt(kPi / 3.0);
    c.expect(std::abs(A0 - A0_exact) / A0_exact < 1e-8, "A(0) at q = 0");
    const double L0 = L_of_q(0.0), L0_exact = 4.0 * std::exp(2.0) * kPi / 3.0;
    c.expect(std::abs(L0 - L0_exact) / L0_exact < 1e-12, "L(0)");
    // continuity as a limit: the gap shrinks linearly and is below 1e-6 at |q| = 1e-8
    double gap8 = 0.0;
    std::vector<double> slopes;
    for (double s : {1.0, -1.0}) {
        for (double d : {1e-6, 1e-7, 1e-8}) {
            const double g = L_of_q(s * d) - L0;
            slopes.push_back(g / (s * d));
            if (d == 1e-8) gap8 = std::max(gap8, std::abs(g));
        }
    }
    c.expect(gap8 < 1e-6, "L gap at 1e-8");
    const auto [lo, hi] = std::minmax_element(slopes.begin(), slopes.end());
    c.expect(*hi - *lo < 1e-2 * std::abs(*hi), "L one-sided slopes disagree");
    return fmt("A(0) rel %.1e; |L(+-1e-8)-L(0)| = %.1e; slope %.4f", std::abs(A0 - A0_exact) / A0_exact, gap8,
               slopes.front());
}

// ---- 5 ----
std::string crossings(Check& c) {
    const CrossingsReport r = crossings_report();
    auto find = [&](const std::string& curves, double near) {
        double best = std::nan("");
        for (const Crossing& x : r.crossings) {
            if (x.curves == curves && std::abs(x.q - near) < 0.05 && !(std::abs(best - near) < std::abs(x.q - near)))
                best = x.q;
        }
        return best;
    };
    const double one = find("E0=L", 1.0), qss = find("E0=L", 1.775), qs = find("E0=4pi^2", 1.768);
    c.expect_close(one, 1.0, 1e-8, "E0 = L at 1");
    c.expect_close(qss, 1.775, 0.01, "q**");
    c.expect_close(qs, 1.768, 0.01, "q*");
    return fmt("E0=L at %.10f and %.6f; E0=4pi^2 at %.6f", one, qss, qs);
}

// ---- 6 ----
std::string identities(Check& c) {
    double worst_A = 0.0;
    for (double q : {-3.0, -0.5, 0.0, 0.5, 1.5, 2.0, 2.5, 3.5}) {
        for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) worst_A = std::max(worst_A, alpha_derivatives(a, q).A_identity_residual);
    }
    c.expect(worst_A < 1e-5, "A' identity residual");

    std::mt19937 rng(20261015);
    std::uniform_real_distribution<double> ua(0.05, 0.95), uq(-3.0, 3.0);
    int anti = 0, samples = 0;
    while (samples < 50) {
        const double a = ua(rng), q = uq(rng);
        if (std::abs(q - 1.0) < 0.02 || std::abs(q + 1.0) < 0.02) continue;
        const FPrimeCheck f = F_prime_identity(a, q);
        ++samples;
        if (f.dF * f.dE < 0.0) ++anti;
        else c.expect(false, fmt("dF dE >= 0 at alpha %.4f q %.4f", a, q));
    }

    // second variation: Richardson-extrapolated difference quotient of the energy
    double worst_d2 = 0.0, worst_mu = 0.0;
    for (double q : {-3.0, 0.0, 0.5, 2.0, 2.5}) {
        const PeriodicState s = unit_D(q, 0.5);
        Profile h = s.profile;
        h.dys.clear();
        Profile u = Profile::periodic_grid(s.X, h.size());
        for (std::size_t j = 0; j < h.size(); ++j) {
            const double th = 2 * kPi * h.xs[j] / s.X;
            u.ys[j] = std::cos(th) + 0.5 * std::sin(2 * th) - 0.25 * std::cos(3 * th);
        }
        const VariationReport v = variations(h, u, s.params);
        auto E = [&](double e) {
            Profile p = h;
            for (std::size_t j = 0; j < p.size(); ++j) p.ys[j] += e * u.ys[j];
            return energy(p, s.params);
        };
        auto dq = [&](double e) { return (E(e) - 2 * E(0.0) + E(-e)) / (e * e); };
        const double e = 2e-3 * h.min();
        const double direct = (4.0 * dq(e / 2) - dq(e)) / 3.0;
        worst_d2 = std::max(worst_d2, std::abs(direct - v.d2) / v.scale2);
        ClassifyOptions co;
        const StabilityVerdict vd = classify(s, co);
        worst_mu = std::max(worst_mu, std::abs(vd.mu1 - vd.X * vd.X * vd.tau1) / std::max(1.0, std::abs(vd.mu1)));
    }
    c.expect(worst_d2 < 1e-6, "second variation direct vs formula");
    c.expect(worst_mu < 1e-6, "mu1 = X^2 tau1");
    return fmt("A' residual %.1e; dF dE < 0 in %.0f/50; d2 rel %.1e", worst_A, anti, worst_d2) +
           fmt("; mu1 rel %.1e", worst_mu);
}

// ---- 7 ----
std::string stability(Check& c) {
    double worst_const = 0.0;
    for (double q : {-3.0, 0.5, 2.0, 2.5}) {
        const auto p = OscillatorParams::canonical(q, 1.3);
        for (double X : {2.0, 7.0}) {
            Profile h = Profile::periodic_grid(X, 128);
            for (double& y : h.ys) y = 0.9;
            const double want = std::pow(2 * kPi / X, 2) - 1.3 * std::pow(0.9, q - 1.0);
            worst_const = std::max(worst_const, std::abs(tau1(h, p).tau1 - want) / (std::abs(want) + 1.0));
        }
    }
    c.expect(worst_const < 1e-9, "constant tau1");

    for (double a : {0.2, 0.5, 0.8}) {
        const StabilityVerdict v = classify(unit_D(-3.0, a));
        c.expect(v.kind == VerdictKind::EnergyUnstable && !v.witnesses.empty() && v.witnesses[0].variations.d2 < 0.0,
                 fmt("q = -3 alpha %.1f", a));
        c.expect(classify(unit_D(1.5, a)).kind == VerdictKind::EnergyStable, fmt("q = 1.5 alpha %.1f", a));
    }

    // q = 2: -h'' from the steady equation h'' = -(bond h^2 - D)/2
    const PeriodicState s2 = unit_D(2.0, 0.5);
    Profile u = s2.profile;
    u.dys.clear();
    double mean = 0.0;
    for (double& y : u.ys) {
        y = 0.5 * (y * y - s2.D);
        mean += y / static_cast<double>(u.size());
    }
    for (double& y : u.ys) y -= mean;
    const VariationReport w = variations(s2.profile, u, s2.params);
    c.expect(std::abs(w.d2) < 1e-7 * w.scale2 && w.d3 < 0.0, "q = 2 witness -h''");

    // least period X/2 analysed on X
    double worst_tau = -1e300;
    for (double q : {0.5, 1.5, 2.5}) {
        const PeriodicState s = unit_D(q, 0.5);
        ClassifyOptions co;
        co.at_period = 2.0 * s.X;
        worst_tau = std::max(worst_tau, classify(s, co).tau1);
    }
    c.expect(worst_tau < 0.0, "doubled period tau1");
    return fmt("constant tau1 rel %.1e; q=2 d2/scale %.1e d3 %.3f", worst_const, w.d2 / w.scale2, w.d3) +
           fmt("; max tau1 at doubled period %.3e", worst_tau);
}

// ---- 8 ----
std::string levels(Check& c) {
    std::string summary;
    for (double q : {-3.0, 0.5, 1.0, 1.5, 2.0, 2.5}) {
        const LevelReport r = compare_periodic_constant(unit_D(q, 0.5));
        c.expect(r.expected.has_value() && r.consistent, fmt("periodic vs constant at q %.1f", q));
        summary += fmt(" %g:", q) + ordering_name(r.ordering);
    }
    for (double q : {0.5, 2.0, 2.5}) {
        const LevelReport r = compare_periodic_droplet(unit_D(q, 0.5));
        c.expect(r.ordering == Ordering::Lower && r.consistent, fmt("droplet vs periodic at q %.1f", q));
    }
    const double q = 1.768;
    const auto p = OscillatorParams::canonical(q, 1.0);
    const PeriodicSearch probe = construct_periodic(p, 5.0, 1.0);
    c.expect(probe.E_min.has_value(), "no interior minimum of E at q = 1.768");
    if (probe.E_min) {
        const double ends = std::min(E_of_alpha(0.0, q), kFourPiSq);
        const double T = *probe.E_min + 0.5 * (ends - *probe.E_min);
        const TangoReport t = two_state_tango(p, std::pow(T, 1.0 / (3.0 - q)), 1.0);
        c.expect(t.energy1 < t.energy2, "tango E(ss1) < E(ss2)");
        c.expect(t.energy2 > t.energy_constant, "tango E(ss2) > E(constant)");
        summary += fmt("; tango E1-Ec %.3e, E2-Ec %.3e", t.energy1 - t.energy_constant, t.energy2 - t.energy_constant);
    }
    return "periodic-constant" + summary;
}

// ---- 9 ----
PdeConfig pde_config(const OscillatorParams& p, double X) {
    PdeConfig c;
    c.params = p;
    c.X = X;
    c.N = 128;
    c.t_end = 1e8;
    c.dt_max = 1e6;
    return c;
}

std::string pde(Check& c) {
    double worst_mass = 0.0, worst_rise = 0.0, worst_const = 0.0, worst_run = 0.0;
    auto timed = [&](const Profile& h0, const PdeConfig& cfg) {
        const auto t0 = std::chrono::steady_clock::now();
        Trajectory t = evolve(h0, cfg);
        worst_run = std::max(worst_run, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        worst_mass = std::max(worst_mass, t.max_mass_drift);
        const double scale = std::abs(t.series.front().energy) + 1.0;
        worst_rise = std::max(worst_rise, t.max_energy_increase / scale);
        return t;
    };

    for (double q : {-3.0, 0.5, 2.5}) {
        Profile h = Profile::periodic_grid(4.0, 128);
        for (double& y : h.ys) y = 1.2;
        PdeConfig cfg = pde_config(OscillatorParams::canonical(q, 1.0), 4.0);
        cfg.t_end = 100.0;
        const Trajectory t = timed(h, cfg);
        for (double y : t.final_profile().ys) worst_const = std::max(worst_const, std::abs(y - 1.2));
    }
    c.expect(worst_const < 1e-14, "constant data moved");

    // witness of each energy-unstable state, started from the scheme's own steady state
    int unstable_runs = 0;
    const std::vector<std::pair<OscillatorParams, double>> cases{
        {OscillatorParams::from_exponents(3, -1, 1.0), 0.5}, {OscillatorParams::from_exponents(1, 0.5, 1.0), 0.5},
        {OscillatorParams::from_exponents(1, 2.0, 1.0), 0.5}, {OscillatorParams::from_exponents(1, 2.5, 1.0), 0.5}};
    for (const auto& [p, a] : cases) {
        const PeriodicState s = rescale_to_physical(a, p, {1.0, std::nullopt, std::nullopt}, 128);
        ClassifyOptions co;
        co.npoints = 128;
        const StabilityVerdict v = classify(s, co);
        if (v.kind != VerdictKind::EnergyUnstable || v.witnesses.empty()) continue;
        ++unstable_runs;
        const Profile hd = discrete_steady_state(s.profile, p);
        const double Ess = discrete_energy(hd.ys, s.X, p);
        const VariationReport& wv = v.witnesses[0].variations;
        const double sign = (wv.d2 >= 0.0 && wv.d3 > 0.0) ? -1.0 : 1.0;
        Profile h0 = hd;
        const double eps = sign * 1e-3 * hd.min();
        for (std::size_t j = 0; j < h0.size(); ++j) h0.ys[j] += eps * v.witnesses[0].direction.ys[j];
        const Trajectory t = timed(h0, pde_config(p, s.X));
        bool below = true;
        for (const SeriesPoint& sp : t.series) below = below && sp.energy < Ess;
        c.expect(below, fmt("witness run at q %.1f did not stay below E(h_ss)", p.q));
    }
    c.expect(unstable_runs == 4, "expected four energy-unstable states");

    // mountain pass at q = 2.5, X^2 between L and 4 pi^2
    const auto p = OscillatorParams::from_exponents(3, 4.5, 1.0);
    const double X = std::sqrt((L_of_q(2.5) + kFourPiSq) / 2);
    const PeriodicSearch ps = construct_periodic(p, X, X, 128);
    c.expect(ps.states.size() == 1, "mountain-pass state missing");
    std::string fates;
    if (!ps.states.empty()) {
        const PeriodicState& s = ps.states[0];
        const DropletConfiguration drop = assemble_configuration(X, {construct_droplet(p, X)}, {0.0});
        const std::vector<SteadyState> cands{ConstantState{p, 1.0, X}, drop, s};
        const char* want[2] = {"constant", "droplet_configuration"};
        int i = 0;
        for (double eps : {1e-3, -1e-3}) {
            const Trajectory t = timed(perturb(s, Direction{DirectionKind::HSecond, 1, {}}, eps, 128), pde_config(p, X));
            const LimitMatch m = detect_limit(t, cands);
            c.expect(m.kind == want[i] && m.distance < 1e-2, fmt("mountain pass eps %.0e", eps));
            fates += m.kind + fmt(" (%.1e)", m.distance);
            if (i == 0) fates += " / ";
            ++i;
        }
    }
    c.expect(worst_mass < 1e-10, "mass drift");
    c.expect(worst_rise <= 1e-12, "energy increased in an accepted step");
    c.expect(worst_run < 60.0, "run over 60 s");
    return fmt("mass drift %.1e; max rise %.1e; slowest run %.2fs; ", worst_mass, worst_rise, worst_run) + fates;
}

// ---- 10 ----
std::string routes(Check& c) {
    double worst = 0.0;
    int n = 0;
    auto take = [&](const LevelReport& r) {
        if (!std::isfinite(r.delta_energy) || !std::isfinite(r.delta_formula)) return;
        ++n;
        const double scale = std::max(std::abs(r.delta_energy), std::abs(r.delta_formula));
        if (scale == 0.0) return;
        const bool same_sign = (r.delta_energy > 0) == (r.delta_formula > 0);
        const double rel = std::abs(r.delta_energy - r.delta_formula) / scale;
        // near-ties are judged by the absolute error against the state's energy scale
        c.expect(same_sign || scale < 1e-9, r.first + " vs " + r.second + " sign");
        c.expect(rel < 1e-6 || scale < 1e-9, r.first + " vs " + r.second + fmt(" rel %.1e", rel));
        if (scale >= 1e-9) worst = std::max(worst, rel);
    };
    for (double q : {-3.0, -0.5, 0.0, 0.5, 1.5, 2.0, 2.5}) {
        for (double a : {0.2, 0.5, 0.8}) {
            const PeriodicState s = unit_D(q, a);
            take(compare_periodic_constant(s));
            if (q > -1.0) take(compare_periodic_droplet(s));
        }
    }
    for (double q : {-0.5, 0.0, 0.5, 1.5, 2.0, 2.5}) {
        const auto p = OscillatorParams::canonical(q, 1.0);
        for (double f : {0.5, 0.9, 1.1, 2.0}) {
            const double X = std::sqrt(f * L_of_q(q));
            if (droplet_exists(p, 1.0, X).exists) take(compare_constant_droplet(p, 1.0, X));
        }
    }
    return fmt("%.0f comparisons, worst relative gap %.1e", n, worst);
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<std::string(Check&)> run;
        double budget;  ///< seconds
    };
    const std::vector<Criterion> all{
        {"limits alpha -> 1", limits, 10.0},
        {"q = 1 exactness", linear_case, 1e9},
        {"Beta closed forms and J", beta_forms, 1e9},
        {"q = 0 constants", q_zero, 1e9},
        {"crossings", crossings, 30.0},
        {"identity suite", identities, 1e9},
        {"stability suite", stability, 1e9},
        {"level theorems", levels, 1e9},
        {"PDE properties", pde, 1e9},
        {"route agreement", routes, 1e9},
    };
    int failed = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        Check c;
        std::string detail;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            detail = all[i].run(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        c.expect(secs < all[i].budget, fmt("took %.1f s", secs));
        const bool ok = c.failures == 0;
        failed += !ok;
        std::printf("%s %2zu %-26s %.2fs  %s\n", ok ? "PASS" : "FAIL", i + 1, all[i].name, secs, detail.c_str());
        for (const std::string& n : c.notes) std::printf("       - %s\n", n.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
