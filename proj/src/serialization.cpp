#include "thinfilm/serialization.hpp"

#include <cmath>
#include <limits>

namespace thinfilm {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const OscillatorParams& p) {
    return {{"q", number(p.q)}, {"bond", number(p.bond)}, {"n", number(p.n)}, {"m", number(p.m)}};
}

Json to_json(const AlphaMaps& m) {
    return {{"alpha", number(m.alpha)}, {"beta", number(m.beta)}, {"P", number(m.P)}, {"A", number(m.A)},
            {"I2", number(m.I2)},       {"E", number(m.E)},       {"dP", number(m.dP)}, {"dA", number(m.dA)},
            {"dE", number(m.dE)}};
}

Json to_json(const Profile& p, bool with_samples) {
    Json j{{"length", number(p.length)}, {"points", p.size()}, {"periodic", p.periodic}, {"meta", p.meta}};
    if (!p.ys.empty()) {
        j["min"] = number(p.min());
        j["max"] = number(p.max());
        j["mean"] = number(p.mean());
    }
    if (with_samples) {
        j["x"] = p.xs;
        j["h"] = p.ys;
    }
    return j;
}

namespace {

Json droplet_json(const DropletState& d, bool with_samples) {
    return {{"X_hat", number(d.X_hat)},   {"A_hat", number(d.A_hat)},
            {"offset", number(d.offset)}, {"amplitude", number(d.amplitude)},
            {"maps0", to_json(d.maps0)},  {"endpoint_slope", number(d.endpoint_slope)},
            {"profile", to_json(d.profile, with_samples)}};
}

}  // namespace

Json to_json(const SteadyState& s, bool with_samples) {
    // common fields first: kind, q, bond, n, m, alpha, D, X, area (null where undefined)
    Json j{{"kind", kind_name(s)}};
    auto common = [&](const OscillatorParams& p, double alpha, double D, double X, double area) {
        j.update(to_json(p));
        j["alpha"] = number(alpha);
        j["D"] = number(D);
        j["X"] = number(X);
        j["area"] = number(area);
    };
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (const auto* c = std::get_if<ConstantState>(&s)) {
        common(c->params, nan, nan, c->X, c->hbar * c->X);
        j["hbar"] = number(c->hbar);
    } else if (const auto* p = std::get_if<PeriodicState>(&s)) {
        common(p->params, p->alpha, p->D, p->X, p->A_ss);
        j["amplitude"] = number(p->amplitude);
        j["maps"] = to_json(p->maps);
        j["degenerate_family"] = p->degenerate_family;
        j["invariance_residual"] = number(p->invariance_residual);
        j["profile"] = to_json(p->profile, with_samples);
    } else if (const auto* d = std::get_if<DropletState>(&s)) {
        common(d->params, 0.0, nan, d->X_hat, d->A_hat);
        j.update(droplet_json(*d, with_samples));
    } else {
        const auto& cfg = std::get<DropletConfiguration>(s);
        double area = 0.0;
        Json arr = Json::array();
        for (const DropletState& d : cfg.droplets) {
            area += d.A_hat;
            arr.push_back(droplet_json(d, with_samples));
        }
        if (!cfg.droplets.empty()) common(cfg.droplets.front().params, 0.0, nan, cfg.X, area);
        else j["X"] = number(cfg.X);
        j["droplets"] = arr;
    }
    return j;
}

Json to_json(const StabilityVerdict& v, bool with_samples) {
    Json w = Json::array();
    for (const Witness& x : v.witnesses) {
        Json e{{"label", x.label},
               {"d1", number(x.variations.d1)},
               {"d2", number(x.variations.d2)},
               {"d3", number(x.variations.d3)},
               {"d4", number(x.variations.d4)},
               {"scale2", number(x.variations.scale2)}};
        if (with_samples) e["direction"] = x.direction.ys;
        w.push_back(e);
    }
    Json j{{"verdict", verdict_name(v.kind)}, {"theorem", v.theorem}, {"tau1", number(v.tau1)},
           {"mu1", number(v.mu1)},           {"dE", number(v.dE)},     {"X", number(v.X)},
           {"neumann", v.neumann},           {"witnesses", w},        {"note", v.note}};
    if (with_samples && !v.eigenfunction.ys.empty()) j["eigenfunction"] = v.eigenfunction.ys;
    return j;
}

Json to_json(const LevelReport& r) {
    Json diag = Json::object();
    for (const auto& [k, v] : r.diagnostics) diag[k] = number(v);
    return {{"first", r.first},
            {"second", r.second},
            {"ordering", ordering_name(r.ordering)},
            {"delta_energy", number(r.delta_energy)},
            {"delta_formula", number(r.delta_formula)},
            {"theorem", r.theorem},
            {"reason", r.reason},
            {"expected", r.expected ? Json(*r.expected) : Json(nullptr)},
            {"consistent", r.consistent},
            {"diagnostics", diag}};
}

Json to_json(const CrossingsReport& r) {
    Json arr = Json::array();
    for (const Crossing& c : r.crossings) arr.push_back({{"curves", c.curves}, {"q", number(c.q)}, {"value", number(c.value)}});
    return {{"crossings", arr},
            {"q_near_3", number(r.q_near_3)},
            {"E0_near_3", number(r.E0_near_3)},
            {"L_near_3", number(r.L_near_3)}};
}

Json to_json(const TangoReport& t) {
    return {{"state1", to_json(SteadyState{t.ss1})},
            {"state2", to_json(SteadyState{t.ss2})},
            {"verdict1", to_json(t.verdict1)},
            {"verdict2", to_json(t.verdict2)},
            {"energy1", number(t.energy1)},
            {"energy2", number(t.energy2)},
            {"energy_constant", number(t.energy_constant)},
            {"alpha_crit", number(t.alpha_crit)},
            {"delta_decreasing", t.delta_decreasing},
            {"alphaP_increasing", t.alphaP_increasing}};
}

Json to_json(const PdeConfig& c) {
    return {{"params", to_json(c.params)},
            {"N", c.N},
            {"X", number(c.X)},
            {"dt", number(c.dt)},
            {"t_end", number(c.t_end)},
            {"theta", number(c.theta)},
            {"positivity_floor", number(c.positivity_floor)},
            {"dt_max", number(c.dt_max)},
            {"max_rel_change", number(c.max_rel_change)},
            {"max_thinning", number(c.max_thinning)},
            {"steady_tol", number(c.steady_tol)},
            {"steady_count", c.steady_count}};
}

Json to_json(const LimitMatch& m) {
    Json d = Json::array();
    for (double v : m.distances) d.push_back(number(v));
    return {{"rupture", m.rupture},
            {"index", m.index ? Json(*m.index) : Json(nullptr)},
            {"kind", m.kind},
            {"distance", number(m.distance)},
            {"shift", number(m.shift)},
            {"distances", d}};
}

Json manifest(const Trajectory& t) {
    Json j{{"config", to_json(t.config)},
           {"termination", termination_name(t.termination)},
           {"accepted_steps", t.accepted_steps},
           {"rejected_steps", t.rejected_steps},
           {"max_energy_increase", number(t.max_energy_increase)},
           {"max_mass_drift", number(t.max_mass_drift)},
           {"snapshots", t.snapshots.size()}};
    if (!t.series.empty()) {
        j["t_final"] = number(t.series.back().t);
        j["energy_initial"] = number(t.series.front().energy);
        j["energy_final"] = number(t.series.back().energy);
        j["min_h_final"] = number(t.series.back().min_h);
    }
    return stamped(j);
}

Json stamped(Json j) {
    j["tool_version"] = kToolVersion;
    return j;
}

}  // namespace thinfilm
