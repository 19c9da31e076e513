#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "thinfilm/energy_levels.hpp"
#include "thinfilm/errors.hpp"
#include "thinfilm/pde_solver.hpp"
#include "thinfilm/stability.hpp"

using namespace thinfilm;
constexpr double kPi = std::numbers::pi;

namespace {

double max_dev(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
    return d;
}

PeriodicState vdw_state(double alpha, std::size_t N) {
    return rescale_to_physical(alpha, OscillatorParams::from_exponents(3, -1, 1.0), {1.0, std::nullopt, std::nullopt}, N);
}

PdeConfig config_for(const OscillatorParams& p, double X, std::size_t N = 128) {
    PdeConfig c;
    c.params = p;
    c.X = X;
    c.N = N;
    c.t_end = 1e7;
    c.dt_max = 1e6;
    return c;
}

}  // namespace

TEST_CASE("constant data is a fixed point") {
    for (double q : {-3.0, 0.5, 2.5}) {
        const auto p = OscillatorParams::canonical(q, 1.0);
        Profile h = Profile::periodic_grid(5.0, 128);
        for (double& y : h.ys) y = 1.3;
        PdeConfig c = config_for(p, 5.0);
        c.t_end = 10.0;
        const Trajectory t = evolve(h, c);
        for (double y : t.final_profile().ys) CHECK(std::abs(y - 1.3) < 1e-14);
    }
}

TEST_CASE("configuration is validated") {
    PdeConfig c = config_for(OscillatorParams::canonical(3.0), 1.0);
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = config_for(OscillatorParams::canonical(2.0), 1.0, 32);
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = config_for(OscillatorParams::canonical(2.0), 1.0);
    c.theta = 0.2;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("dissipation is the energy decay rate") {
    const PeriodicState s = vdw_state(0.5, 128);
    Profile h = perturb(s, Direction{DirectionKind::Sine, 3, {}}, 0.05 * s.profile.min(), 128);
    PdeConfig c = config_for(s.params, s.X);
    const PdeState st{0.0, 1e-9, h.ys};
    const StepResult r = step(st, c);
    const double rate = (discrete_energy(h.ys, s.X, s.params) - r.energy) / r.dt_taken;
    CHECK(rate == doctest::Approx(discrete_dissipation(h.ys, s.X, s.params)).epsilon(1e-4));
}

TEST_CASE("discrete steady state converges to the exact one at second order") {
    double dev[2];
    int i = 0;
    for (std::size_t N : {128, 256}) {
        const PeriodicState s = vdw_state(0.5, N);
        const Profile hd = discrete_steady_state(s.profile, s.params);
        dev[i++] = max_dev(hd.ys, s.profile.ys) / s.profile.max();
        CHECK(hd.mean() == doctest::Approx(s.profile.mean()).epsilon(1e-13));
    }
    CHECK(dev[0] < 1e-3);
    CHECK(dev[0] / dev[1] > 3.5);
}

TEST_CASE("q = -3: the two signs of an unstable eigenfunction separate") {
    const PeriodicState s = vdw_state(0.5, 128);
    const Profile hd = discrete_steady_state(s.profile, s.params);
    const Tau1Result tr = tau1(hd, s.params, Discretization::FiniteDifference, true);
    REQUIRE(tr.tau1 < 0.0);
    const double Ess = discrete_energy(hd.ys, s.X, s.params);
    std::vector<Termination> fates;
    for (double eps : {1e-3, -1e-3}) {
        Profile h0 = hd;
        for (std::size_t j = 0; j < h0.size(); ++j) h0.ys[j] += eps * tr.eigenfunction.ys[j];
        const Trajectory t = evolve(h0, config_for(s.params, s.X));
        CHECK(t.max_mass_drift < 1e-10);
        CHECK(t.max_energy_increase <= 1e-12 * std::abs(Ess));
        for (const auto& sp : t.series) CHECK(sp.energy < Ess);
        fates.push_back(t.termination);
    }
    CHECK(fates[0] != fates[1]);
}

TEST_CASE("zero eps reproduces the sampled state") {
    const PeriodicState s = vdw_state(0.5, 128);
    const Profile h = perturb(s, Direction{}, 0.0, 128);
    CHECK(max_dev(h.ys, s.profile.ys) < 1e-14);
}

TEST_CASE("directions are zero mean and unit norm") {
    const PeriodicState s = vdw_state(0.4, 128);
    for (DirectionKind k : {DirectionKind::HPrime, DirectionKind::HSecond, DirectionKind::Kappa, DirectionKind::Sine}) {
        const Profile u = direction_profile(s, Direction{k, 2, {}}, 128);
        double m = 0.0, n2 = 0.0;
        for (double y : u.ys) {
            m += y;
            n2 += y * y * s.X / 128.0;
        }
        CHECK(std::abs(m) < 1e-10);
        CHECK(n2 == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK_THROWS(perturb(s, Direction{}, 1e3, 128));
}

TEST_CASE("h'' lowers and a short sine raises the discrete energy at q = 2.5") {
    const auto p = OscillatorParams::canonical(2.5, 1.0);
    const PeriodicState s = rescale_to_physical(0.5, p, {1.0, std::nullopt, std::nullopt}, 128);
    const Profile hd = discrete_steady_state(s.profile, p);
    const double E = discrete_energy(hd.ys, s.X, p);
    const double eps = 1e-3;
    const Profile u = direction_profile(s, Direction{DirectionKind::HSecond, 1, {}}, 128);
    const Profile w = direction_profile(s, Direction{DirectionKind::Sine, 12, {}}, 128);
    std::vector<double> a = hd.ys, b = hd.ys;
    for (std::size_t j = 0; j < a.size(); ++j) {
        a[j] += eps * u.ys[j];
        b[j] += eps * w.ys[j];
    }
    CHECK(discrete_energy(a, s.X, p) < E);
    CHECK(discrete_energy(b, s.X, p) > E);
}

TEST_CASE("detect_limit finds a shifted candidate") {
    const auto p = OscillatorParams::canonical(1.5, 1.0);
    const PeriodicState s = rescale_to_physical(0.5, p, {1.0, std::nullopt, std::nullopt}, 128);
    Trajectory t;
    t.config = config_for(p, s.X);
    Profile h = Profile::periodic_grid(s.X, 128);
    std::vector<double> xs = h.xs;
    const double shift = 0.237 * s.X;
    for (double& x : xs) x += shift;
    h.ys = state_values(s, s.X, xs);
    t.snapshots.push_back({0.0, h});
    const LimitMatch m = detect_limit(t, {ConstantState{p, s.A_ss / s.X, s.X}, s});
    REQUIRE(m.index);
    CHECK(*m.index == 1);
    CHECK(m.kind == "periodic");
    CHECK(m.distance < 1e-6);
    CHECK(std::abs(std::remainder(m.shift + shift, s.X)) < 1e-6 * s.X);
}

TEST_CASE("perturbed stable periodic state returns to it") {
    // the gap to the exact state is the scheme's O(dx^2) error: 6e-3 at N = 128, 1.5e-3 at 256
    const auto p = OscillatorParams::from_exponents(1, 1.5, 1.0);
    for (std::size_t N : {128, 256}) {
        const PeriodicState s = rescale_to_physical(0.5, p, {1.0, std::nullopt, std::nullopt}, N);
        const Profile h0 = perturb(s, Direction{DirectionKind::Sine, 1, {}}, 1e-2, N);
        const Trajectory t = evolve(h0, config_for(p, s.X, N));
        CHECK(t.termination == Termination::Steady);
        const LimitMatch m = detect_limit(t, {ConstantState{p, s.A_ss / s.X, s.X}, s});
        CHECK(m.kind == "periodic");
        CHECK(m.distance < (N == 128 ? 1e-2 : 5e-3));
    }
}

TEST_CASE("mountain pass at q = 2.5") {
    const auto p = OscillatorParams::from_exponents(3, 4.5, 1.0);
    const double X = std::sqrt((L_of_q(2.5) + 4 * kPi * kPi) / 2);
    const PeriodicSearch ps = construct_periodic(p, X, X, 128);
    REQUIRE(ps.states.size() == 1);
    const PeriodicState& s = ps.states[0];
    const DropletConfiguration drop = assemble_configuration(X, {construct_droplet(p, X)}, {0.0});
    const std::vector<SteadyState> cands{ConstantState{p, 1.0, X}, drop, s};
    const std::string expected[2] = {"constant", "droplet_configuration"};
    int i = 0;
    for (double eps : {1e-3, -1e-3}) {
        const Trajectory t = evolve(perturb(s, Direction{DirectionKind::HSecond, 1, {}}, eps, 128), config_for(p, X));
        const LimitMatch m = detect_limit(t, cands);
        CHECK(m.kind == expected[i++]);
        CHECK(m.distance < 1e-2);
        CHECK(t.max_mass_drift < 1e-10);
    }
}

TEST_CASE("csv writers") {
    Trajectory t;
    Profile h = Profile::periodic_grid(1.0, 64);
    for (double& y : h.ys) y = 1.0;
    t.snapshots.push_back({0.0, h});
    t.series.push_back({0.0, 1.0, 0.5, 1.0, 0.0});
    std::ostringstream a, b;
    write_series_csv(a, t);
    write_profile_csv(b, h);
    CHECK(a.str().rfind("t,mass,energy,min_h,dissipation\n", 0) == 0);
    const std::string rows = b.str();
    CHECK(std::count(rows.begin(), rows.end(), '\n') == 65);
}
