// Command-line front end for the thin-film steady-state and energy tools.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "thinfilm/energy_levels.hpp"
#include "thinfilm/errors.hpp"
#include "thinfilm/oscillator.hpp"
#include "thinfilm/pde_solver.hpp"
#include "thinfilm/serialization.hpp"
#include "thinfilm/stability.hpp"
#include "thinfilm/steady_states.hpp"

using namespace thinfilm;
namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Options {
    std::vector<double> q;
    double bond = 1.0;
    std::optional<double> n;
    std::optional<double> m;
    std::optional<double> X;
    std::optional<double> area;
    std::optional<double> hbar;
    std::optional<double> alpha;
    std::string alpha_grid = "0.05:0.95:19";
    std::string state = "periodic";
    std::size_t N = 128;
    double dt = 1e-4;
    double t_end = 1e7;
    double eps = 1e-3;
    std::string direction = "eigen";
    std::string out;
    std::uint64_t seed = 1;
    bool samples = false;
    bool raw_start = false;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

double single_q(const Options& o) {
    if (o.q.size() == 1) return o.q.front();
    if (o.q.empty() && o.n && o.m) return *o.m - *o.n + 1.0;
    throw ValidationError("this command takes exactly one --q (or --n and --m)");
}

OscillatorParams params_of(const Options& o) {
    const double q = single_q(o);
    if (o.n || o.m) {
        if (!(o.n && o.m)) throw ValidationError("--n and --m must be given together");
        OscillatorParams p = OscillatorParams::from_exponents(*o.n, *o.m, o.bond);
        if (!o.q.empty() && o.q.front() != p.q) throw ValidationError("--q must equal m - n + 1");
        return p;
    }
    return OscillatorParams::canonical(q, o.bond);
}

double positive(const std::optional<double>& v, const char* name) {
    if (!v) throw ValidationError(std::string("missing --") + name);
    if (!(*v > 0.0) || !std::isfinite(*v)) throw ValidationError(std::string("--") + name + " must be positive");
    return *v;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        double a = 0.0, b = 0.0;
        int n = 0;
        if (std::sscanf(text.c_str(), "%lf:%lf:%d", &a, &b, &n) != 3 || n < 1) {
            throw ValidationError("grid must be a:b:n or a comma list");
        }
        for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ValidationError("bad grid entry '" + item + "'");
        }
    }
    return out;
}

/// Writes to out/name when --out is set, otherwise to stdout.
void emit(const Options& o, const std::string& name, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::error_code ec;
    fs::create_directories(o.out, ec);
    std::ofstream f(fs::path(o.out) / name, std::ios::binary);
    if (!f) throw IoError("cannot write " + (fs::path(o.out) / name).string());
    f << text;
    if (!f) throw IoError("write failed for " + name);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

int cmd_maps(const Options& o) {
    const std::vector<double> alphas = parse_grid(o.alpha_grid);
    for (double a : alphas) {
        if (!(a >= 0.0 && a < 1.0)) throw ValidationError("alpha grid must lie in [0, 1)");
    }
    std::vector<double> qs = o.q;
    if (qs.empty()) qs.push_back(single_q(o));
    for (double q : qs) {
        std::ostringstream os;
        write_alpha_table(os, q, alphas);
        char name[64];
        std::snprintf(name, sizeof name, "maps_q%.6g.csv", q);
        if (o.out.empty() && qs.size() > 1) std::cout << "# q = " << q << "\n";
        emit(o, name, os.str());
    }
    return 0;
}

std::vector<SteadyState> states_of(const Options& o, const OscillatorParams& p) {
    std::vector<SteadyState> out;
    if (o.state == "constant") {
        const double X = positive(o.X, "X");
        const double hbar = o.hbar ? positive(o.hbar, "hbar") : positive(o.area, "area") / X;
        out.emplace_back(ConstantState{p, hbar, X});
    } else if (o.state == "periodic") {
        if (o.alpha) {
            // the missing size follows from bond X^(3-q) A^(q-1) = E(alpha)
            RescaleTarget t;
            const double E = E_of_alpha(*o.alpha, p.q);
            if (o.X && o.area) {
                t.X = positive(o.X, "X");
                t.A_ss = positive(o.area, "area");
            } else if (o.X) {
                if (p.q == 1.0) throw ValidationError("q = 1: the period does not fix the area; give --area");
                t.X = positive(o.X, "X");
                t.A_ss = std::pow(E / (p.bond * std::pow(*t.X, 3.0 - p.q)), 1.0 / (p.q - 1.0));
            } else if (o.area) {
                if (p.q == 3.0) throw ValidationError("q = 3: the area does not fix the period; give --X");
                t.A_ss = positive(o.area, "area");
                t.X = std::pow(E / (p.bond * std::pow(*t.A_ss, p.q - 1.0)), 1.0 / (3.0 - p.q));
            } else {
                t.D = 1.0;
            }
            out.emplace_back(rescale_to_physical(*o.alpha, p, t, o.N));
        } else {
            const PeriodicSearch s = construct_periodic(p, positive(o.X, "X"), positive(o.area, "area"), o.N);
            for (const std::string& w : s.warnings) std::cerr << "warning: " << w << "\n";
            if (s.states.empty()) throw ValidationError("no periodic steady state with this period and area");
            for (const PeriodicState& ps : s.states) out.emplace_back(ps);
        }
    } else if (o.state == "droplet") {
        out.emplace_back(construct_droplet(p, positive(o.area, "area"), o.N));
    } else {
        throw ValidationError("--state must be constant, periodic or droplet");
    }
    return out;
}

int cmd_classify(const Options& o) {
    const OscillatorParams p = params_of(o);
    Json arr = Json::array();
    ClassifyOptions co;
    co.npoints = std::max<std::size_t>(o.N, 64);
    for (const SteadyState& s : states_of(o, p)) {
        arr.push_back({{"state", to_json(s, o.samples)}, {"verdict", to_json(classify(s, co), o.samples)}});
    }
    emit(o, "classify.json", dump(stamped({{"results", arr}})));
    return 0;
}

int cmd_levels(const Options& o) {
    const OscillatorParams p = params_of(o);
    const double X = positive(o.X, "X");
    const double area = o.area ? positive(o.area, "area") : positive(o.hbar, "hbar") * X;
    Json reports = Json::array();
    reports.push_back(to_json(compare_constant_droplet(p, area / X, X)));
    if (p.q != 1.0) {
        const PeriodicSearch s = construct_periodic(p, X, area, o.N);
        for (const PeriodicState& ps : s.states) {
            reports.push_back(to_json(compare_periodic_constant(ps)));
            reports.push_back(to_json(compare_periodic_droplet(ps)));
        }
    }
    Json j{{"params", to_json(p)}, {"X", X}, {"area", area}, {"reports", reports}};
    if (p.q > -1.0 && p.q < 3.0) j["L"] = number(L_of_q(p.q));
    if (p.q > -1.0) j["E0"] = number(E0_of_q(p.q));
    j["crossings"] = to_json(crossings_report());
    emit(o, "levels.json", dump(stamped(j)));
    if (!o.out.empty()) {
        std::vector<double> qs;
        for (int i = 0; i <= 398; ++i) qs.push_back(-0.99 + 0.01 * i);
        std::ostringstream os;
        write_q_table(os, qs);
        emit(o, "thresholds.csv", os.str());
    }
    return 0;
}

int cmd_droplet(const Options& o) {
    const OscillatorParams p = params_of(o);
    const DropletState d = construct_droplet(p, positive(o.area, "area"), o.N);
    Json j{{"droplet", to_json(SteadyState{d}, o.samples)}};
    if (o.X) {
        const DropletExistence e = droplet_exists(p, d.A_hat / *o.X, *o.X);
        j["fits_in_X"] = {{"exists", e.exists}, {"lhs", number(e.lhs)}, {"E0", number(e.E0)}, {"reason", e.reason}};
    }
    j["energy_G"] = number(droplet_energy(d, Normalization::G));
    emit(o, "droplet.json", dump(stamped(j)));
    return 0;
}

int cmd_tango(const Options& o) {
    const OscillatorParams p = params_of(o);
    const TangoReport t = two_state_tango(p, positive(o.X, "X"), positive(o.area, "area"), o.N);
    emit(o, "tango.json", dump(stamped(to_json(t))));
    return 0;
}

int cmd_crossings(const Options& o) {
    emit(o, "crossings.json", dump(stamped(to_json(crossings_report()))));
    return 0;
}

Direction direction_of(const Options& o, const Profile& base, const OscillatorParams& p) {
    Direction d;
    if (o.direction == "hprime") d.kind = DirectionKind::HPrime;
    else if (o.direction == "hsecond") d.kind = DirectionKind::HSecond;
    else if (o.direction == "kappa") d.kind = DirectionKind::Kappa;
    else if (o.direction.rfind("sine", 0) == 0) {
        d.kind = DirectionKind::Sine;
        d.wavenumber = o.direction.size() > 4 ? std::stoi(o.direction.substr(4)) : 1;
    } else if (o.direction == "eigen") {
        d.kind = DirectionKind::Custom;
        // even lowest mode of the scheme's own second variation
        d.custom = tau1(base, p, Discretization::FiniteDifference, true).eigenfunction;
    } else if (o.direction == "random") {
        d.kind = DirectionKind::Custom;
        std::mt19937_64 rng(o.seed);
        std::normal_distribution<double> g(0.0, 1.0);
        d.custom = Profile::periodic_grid(base.length, base.size(), "random");
        for (int k = 1; k <= 8; ++k) {
            const double a = g(rng) / k, b = g(rng) / k;
            for (std::size_t j = 0; j < base.size(); ++j) {
                const double th = 2.0 * std::numbers::pi * k * d.custom.xs[j] / base.length;
                d.custom.ys[j] += a * std::cos(th) + b * std::sin(th);
            }
        }
    } else {
        throw ValidationError("--direction must be hprime, hsecond, kappa, sine<k>, eigen or random");
    }
    return d;
}

int cmd_evolve(const Options& o) {
    const OscillatorParams p = params_of(o);
    if (o.out.empty()) throw ValidationError("evolve needs --out for its run directory");
    const std::vector<SteadyState> states = states_of(o, p);
    const SteadyState& ss = states.front();
    const double X = std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, DropletState>) return s.X_hat;
            else return s.X;
        },
        ss);
    Profile base = sample_on_periodic_grid(ss, o.N);
    base.dys.clear();
    if (!o.raw_start && base.min() > 0.0) base = discrete_steady_state(base, p);

    Profile h0 = base;
    if (o.eps != 0.0) {
        const Direction d = direction_of(o, base, p);
        const Profile u = direction_profile(ss, d, o.N);
        for (std::size_t j = 0; j < o.N; ++j) h0.ys[j] += o.eps * u.ys[j];
        if (!(h0.min() > 0.0)) throw ValidationError("perturbed profile is not positive; use a smaller --eps");
    }

    PdeConfig cfg;
    cfg.params = p;
    cfg.N = o.N;
    cfg.X = X;
    cfg.dt = o.dt;
    cfg.t_end = o.t_end;
    cfg.dt_max = std::max(cfg.dt_max, o.dt);
    cfg.snapshot_interval = o.t_end / 10.0;
    const Trajectory traj = evolve(h0, cfg);

    std::vector<SteadyState> candidates;
    const double area = base.mean() * X;
    candidates.emplace_back(ConstantState{p, area / X, X});
    if (p.q != 1.0) {
        try {
            for (const PeriodicState& ps : construct_periodic(p, X, area, o.N).states) candidates.emplace_back(ps);
        } catch (const std::exception&) {
        }
    }
    if (p.q > -1.0 && p.q < 3.0 && 3.0 - p.q >= 1e-3) {
        const DropletExistence e = droplet_exists(p, area / X, X);
        if (e.exists) candidates.emplace_back(assemble_configuration(X, {construct_droplet(p, area, o.N)}, {0.0}));
    }
    const LimitMatch lim = detect_limit(traj, candidates);

    Json man = manifest(traj);
    man["initial_state"] = to_json(ss);
    man["direction"] = o.direction;
    man["eps"] = o.eps;
    man["seed"] = o.seed;
    man["energy_steady"] = number(discrete_energy(base.ys, X, p));
    man["limit"] = to_json(lim);
    Json cands = Json::array();
    for (const SteadyState& c : candidates) cands.push_back(kind_name(c));
    man["candidates"] = cands;
    emit(o, "manifest.json", dump(man));
    std::ostringstream series;
    write_series_csv(series, traj);
    emit(o, "series.csv", series.str());
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        std::ostringstream snap;
        write_profile_csv(snap, traj.snapshots[i].h);
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%03zu.csv", i);
        emit(o, name, snap.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady states, stability and energy levels of power-law thin-film equations"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML/INI file with option values");

    Options o;
    app.add_option("--q", o.q, "exponent q = m - n + 1 (maps accepts several)")->delimiter(',');
    app.add_option("--bond", o.bond, "Bond number");
    app.add_option("--n", o.n, "mobility exponent");
    app.add_option("--m", o.m, "destabilising exponent");
    app.add_option("--X", o.X, "period / domain length");
    app.add_option("--area", o.area, "area under one period");
    app.add_option("--hbar", o.hbar, "constant height");
    app.add_option("--alpha", o.alpha, "minimum of the canonical profile");
    app.add_option("--alpha-grid", o.alpha_grid, "a:b:n or comma list");
    app.add_option("--state", o.state, "constant, periodic or droplet");
    app.add_option("--N", o.N, "grid points");
    app.add_option("--dt", o.dt, "initial time step");
    app.add_option("--t-end", o.t_end, "final time");
    app.add_option("--eps", o.eps, "perturbation size");
    app.add_option("--direction", o.direction, "hprime, hsecond, kappa, sine<k>, eigen, random");
    app.add_option("--out", o.out, "output directory (stdout when omitted)");
    app.add_option("--seed", o.seed, "seed for random directions");
    app.add_flag("--samples", o.samples, "include profile samples in JSON");
    app.add_flag("--raw-start", o.raw_start, "perturb the sampled exact state, not the scheme's steady state");

    struct Cmd {
        const char* name;
        const char* help;
        int (*run)(const Options&);
    };
    const Cmd cmds[] = {
        {"maps", "alpha tables (alpha, P, A, I2, E, dE, F) per q", cmd_maps},
        {"classify", "energy stability verdicts", cmd_classify},
        {"levels", "energy comparisons and threshold tables", cmd_levels},
        {"droplet", "zero-angle droplet of a given area", cmd_droplet},
        {"tango", "two periodic states of equal period and area", cmd_tango},
        {"evolve", "time integration from a perturbed steady state", cmd_evolve},
        {"crossings", "intersections of E0(q), L(q) and 4 pi^2", cmd_crossings},
    };
    std::vector<CLI::App*> subs;
    for (const Cmd& c : cmds) subs.push_back(app.add_subcommand(c.name, c.help));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }
    try {
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (subs[i]->parsed()) return cmds[i].run(o);
        }
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
