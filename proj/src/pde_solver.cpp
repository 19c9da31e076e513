#include "thinfilm/pde_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <boost/math/tools/minima.hpp>

#include "thinfilm/errors.hpp"
#include "thinfilm/oscillator.hpp"
#include "thinfilm/potentials.hpp"
#include "thinfilm/spectral.hpp"

namespace thinfilm {

namespace {

constexpr double kPi = std::numbers::pi;

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

std::size_t up(std::size_t j, std::size_t n) { return j + 1 == n ? 0 : j + 1; }
std::size_t down(std::size_t j, std::size_t n) { return j == 0 ? n - 1 : j - 1; }

/// Face mobilities h_{j+1/2}^n as the mean of the neighbouring nodal values.
std::vector<double> face_mobility(const std::vector<double>& h, double n_exp) {
    const std::size_t N = h.size();
    std::vector<double> M(N);
    for (std::size_t j = 0; j < N; ++j) {
        M[j] = 0.5 * (std::pow(h[j], n_exp) + std::pow(h[up(j, N)], n_exp));
    }
    return M;
}

std::vector<double> chemical_potential(const std::vector<double>& h, double dx, const OscillatorParams& p) {
    const std::size_t N = h.size();
    std::vector<double> mu(N);
    for (std::size_t j = 0; j < N; ++j) {
        const double d2 = (h[up(j, N)] - 2.0 * h[j] + h[down(j, N)]) / (dx * dx);
        mu[j] = -d2 - p.bond * eval_H_prime(h[j], p.q);
    }
    return mu;
}

/// D-( M D+ w ): conservative divergence of the face flux -M D+ w (up to sign).
std::vector<double> flux_divergence(const std::vector<double>& M, const std::vector<double>& w, double dx) {
    const std::size_t N = w.size();
    std::vector<double> flux(N), out(N);
    for (std::size_t j = 0; j < N; ++j) flux[j] = M[j] * (w[up(j, N)] - w[j]) / dx;
    for (std::size_t j = 0; j < N; ++j) out[j] = (flux[j] - flux[down(j, N)]) / dx;
    return out;
}

SpMat flux_matrix(const std::vector<double>& M, double dx) {
    const std::size_t N = M.size();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(3 * N);
    const double s = 1.0 / (dx * dx);
    for (std::size_t j = 0; j < N; ++j) {
        const double mr = M[j] * s;
        const double ml = M[down(j, N)] * s;
        const auto J = static_cast<int>(j);
        t.emplace_back(J, static_cast<int>(up(j, N)), mr);
        t.emplace_back(J, static_cast<int>(down(j, N)), ml);
        t.emplace_back(J, J, -(mr + ml));
    }
    SpMat K(static_cast<int>(N), static_cast<int>(N));
    K.setFromTriplets(t.begin(), t.end());
    return K;
}

SpMat second_difference(std::size_t N, double dx) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(3 * N);
    const double s = 1.0 / (dx * dx);
    for (std::size_t j = 0; j < N; ++j) {
        const auto J = static_cast<int>(j);
        t.emplace_back(J, static_cast<int>(up(j, N)), s);
        t.emplace_back(J, static_cast<int>(down(j, N)), s);
        t.emplace_back(J, J, -2.0 * s);
    }
    SpMat D(static_cast<int>(N), static_cast<int>(N));
    D.setFromTriplets(t.begin(), t.end());
    return D;
}

double energy_scale(const std::vector<double>& h, double X, const OscillatorParams& p) {
    const std::size_t N = h.size();
    const double dx = X / static_cast<double>(N);
    double s = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        const double g = (h[up(j, N)] - h[j]) / dx;
        s += dx * (0.5 * g * g + p.bond * std::abs(eval_H(h[j], p.q)));
    }
    return s;
}

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

void PdeConfig::validate() const {
    params.validate();
    if (N < 64 || N % 2 != 0) throw ValidationError("PDE grid needs an even N >= 64");
    if (!(X > 0.0) || !std::isfinite(X)) throw ValidationError("domain length must be positive");
    if (!(dt > 0.0)) throw ValidationError("time step must be positive");
    if (!(t_end > 0.0)) throw ValidationError("t_end must be positive");
    if (!(theta >= 0.5 && theta <= 1.0)) throw ValidationError("theta must lie in [0.5, 1]");
    if (!(dt_max >= dt)) throw ValidationError("dt_max must be at least dt");
    if (!(max_rel_change > 0.0)) throw ValidationError("max_rel_change must be positive");
    if (!(max_thinning > 0.0 && max_thinning < 1.0)) throw ValidationError("max_thinning must lie in (0, 1)");
    if (steady_count < 1) throw ValidationError("steady_count must be positive");
    if (series_stride < 1) throw ValidationError("series_stride must be positive");
    if (params.q >= 3.0) {
        throw DomainError("m >= n + 2 (q >= 3) allows finite-time blow-up; not simulated");
    }
}

double discrete_energy(const std::vector<double>& h, double X, const OscillatorParams& params) {
    const std::size_t N = h.size();
    const double dx = X / static_cast<double>(N);
    double e = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        const double g = (h[up(j, N)] - h[j]) / dx;
        e += dx * (0.5 * g * g - params.bond * eval_H(h[j], params.q));
    }
    return e;
}

double discrete_dissipation(const std::vector<double>& h, double X, const OscillatorParams& params) {
    const std::size_t N = h.size();
    const double dx = X / static_cast<double>(N);
    const std::vector<double> mu = chemical_potential(h, dx, params);
    const std::vector<double> M = face_mobility(h, params.n);
    double d = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        const double g = (mu[up(j, N)] - mu[j]) / dx;
        d += dx * M[j] * g * g;
    }
    return d;
}

Profile discrete_steady_state(const Profile& guess, const OscillatorParams& params, double tol) {
    params.validate();
    if (!guess.periodic || guess.min() <= 0.0) throw ValidationError("discrete steady state needs a positive periodic guess");
    const std::size_t N = guess.size();
    const double dx = guess.length / static_cast<double>(N);
    std::vector<double> h = guess.ys;
    const double mass = sum(h) * dx;
    double lambda = 0.0;
    for (double m : chemical_potential(h, dx, params)) lambda += m / static_cast<double>(N);
    const auto n = static_cast<int>(N);
    for (int it = 0; it < 60; ++it) {
        const std::vector<double> mu = chemical_potential(h, dx, params);
        Eigen::VectorXd R(n + 1);
        double scale = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            R[static_cast<int>(j)] = mu[j] - lambda;
            scale = std::max(scale, std::abs(mu[j]));
        }
        R[n] = sum(h) * dx - mass;
        if (R.head(n).cwiseAbs().maxCoeff() <= tol * std::max(scale, 1.0) && std::abs(R[n]) <= tol * mass) {
            Profile out = Profile::periodic_grid(guess.length, N, "discrete_steady");
            out.ys = h;
            return out;
        }
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n + 1, n + 1);
        const double s2 = 1.0 / (dx * dx);
        for (std::size_t j = 0; j < N; ++j) {
            const auto J0 = static_cast<int>(j);
            J(J0, static_cast<int>(up(j, N))) -= s2;
            J(J0, static_cast<int>(down(j, N))) -= s2;
            J(J0, J0) += 2.0 * s2 - params.bond * eval_r(h[j], params.q);
            J(J0, n) = -1.0;
            J(n, J0) = dx;
        }
        const Eigen::VectorXd d = J.colPivHouseholderQr().solve(-R);
        double damp = 1.0;
        for (std::size_t j = 0; j < N; ++j) {
            const double nv = h[j] + d[static_cast<int>(j)];
            if (nv <= 0.0) damp = std::min(damp, 0.5 * h[j] / std::abs(d[static_cast<int>(j)]));
        }
        for (std::size_t j = 0; j < N; ++j) h[j] += damp * d[static_cast<int>(j)];
        lambda += damp * d[n];
    }
    throw NumericalError("discrete steady state: Newton iteration did not converge");
}

StepResult step(const PdeState& s, const PdeConfig& cfg) {
    const OscillatorParams& p = cfg.params;
    const std::size_t N = s.h.size();
    if (N != cfg.N) throw ValidationError("state size does not match the configured grid");
    const double dx = cfg.X / static_cast<double>(N);
    const double floor = std::isnan(cfg.positivity_floor) ? 0.0 : cfg.positivity_floor;
    const double hmin = *std::min_element(s.h.begin(), s.h.end());
    const double hmax = *std::max_element(s.h.begin(), s.h.end());
    StepResult res;
    res.state = s;
    if (!(hmin > floor)) {
        res.event = StepEvent::NearRupture;
        return res;
    }

    const double e0 = discrete_energy(s.h, cfg.X, p);
    const double slack = 1e-12 * energy_scale(s.h, cfg.X, p);
    const std::vector<double> M = face_mobility(s.h, p.n);
    const std::vector<double> mu = chemical_potential(s.h, dx, p);
    const std::vector<double> drive = flux_divergence(M, mu, dx);
    const SpMat K = flux_matrix(M, dx);
    std::vector<double> r(N);
    for (std::size_t j = 0; j < N; ++j) r[j] = eval_r(s.h[j], p.q);
    SpMat inner = second_difference(N, dx);
    for (std::size_t j = 0; j < N; ++j) {
        const auto J = static_cast<int>(j);
        inner.coeffRef(J, J) += cfg.theta * p.bond * r[j];
    }
    const SpMat KI = K * inner;
    SpMat I(static_cast<int>(N), static_cast<int>(N));
    I.setIdentity();

    double dt = s.dt;
    while (true) {
        if (dt < cfg.dt_min) {
            res.event = StepEvent::StepTooSmall;
            return res;
        }
        // (I + dt K (D2 + theta bond r)) delta = dt K mu(h); mobility frozen at h.
        SpMat S = I + dt * KI;
        S.makeCompressed();
        Eigen::SparseLU<SpMat> lu;
        lu.compute(S);
        bool ok = lu.info() == Eigen::Success;
        std::vector<double> delta(N);
        if (ok) {
            Vec rhs(static_cast<int>(N));
            for (std::size_t j = 0; j < N; ++j) rhs[static_cast<int>(j)] = dt * drive[j];
            const Vec d = lu.solve(rhs);
            ok = lu.info() == Eigen::Success && d.allFinite();
            if (ok) {
                // Rebuild the increment as an exact flux divergence so mass is conserved
                // to round-off however accurate the solve was.
                std::vector<double> dv(N), mu_star(N);
                for (std::size_t j = 0; j < N; ++j) dv[j] = d[static_cast<int>(j)];
                for (std::size_t j = 0; j < N; ++j) {
                    const double d2 = (dv[up(j, N)] - 2.0 * dv[j] + dv[down(j, N)]) / (dx * dx);
                    mu_star[j] = mu[j] - d2 - cfg.theta * p.bond * r[j] * dv[j];
                }
                const std::vector<double> div = flux_divergence(M, mu_star, dx);
                for (std::size_t j = 0; j < N; ++j) delta[j] = dt * div[j];
            }
        }
        double change = 0.0;
        std::vector<double> h_new(N);
        if (ok) {
            bool thinned = false;
            for (std::size_t j = 0; j < N; ++j) {
                h_new[j] = s.h[j] + delta[j];
                change = std::max(change, std::abs(delta[j]));
                // resolve thinning in time: no node loses more than max_thinning of itself
                thinned = thinned || h_new[j] < (1.0 - cfg.max_thinning) * s.h[j];
            }
            ok = !thinned && change <= cfg.max_rel_change * hmax;
        }
        double e1 = 0.0;
        if (ok) {
            e1 = discrete_energy(h_new, cfg.X, p);
            ok = e1 <= e0 + slack;
        }
        if (!ok) {
            ++res.rejections;
            dt *= 0.5;
            continue;
        }
        res.state.h = std::move(h_new);
        res.state.t = s.t + dt;
        res.dt_taken = dt;
        res.energy = e1;
        res.rate = change / dt;
        const double grow = change < 0.25 * cfg.max_rel_change * hmax ? 2.0 : 1.2;
        res.state.dt = std::min(dt * grow, cfg.dt_max);
        const double new_min = *std::min_element(res.state.h.begin(), res.state.h.end());
        res.event = new_min <= floor ? StepEvent::NearRupture : StepEvent::Accepted;
        return res;
    }
}

std::string termination_name(Termination t) {
    switch (t) {
    case Termination::EndTime: return "end_time";
    case Termination::Steady: return "steady";
    case Termination::NearRupture: return "near_rupture";
    case Termination::StepTooSmall: return "step_too_small";
    case Termination::MaxSteps: return "max_steps";
    }
    return "end_time";
}

Trajectory evolve(const Profile& initial, const PdeConfig& cfg_in) {
    cfg_in.validate();
    PdeConfig cfg = cfg_in;
    if (!initial.periodic || initial.size() != cfg.N || std::abs(initial.length - cfg.X) > 1e-12 * cfg.X) {
        throw ValidationError("initial profile must be periodic on the configured grid");
    }
    if (std::isnan(cfg.positivity_floor)) cfg.positivity_floor = 1e-6 * initial.mean();
    if (!(initial.min() > cfg.positivity_floor)) {
        throw ValidationError("initial data must stay above the positivity floor");
    }
    const OscillatorParams& p = cfg.params;
    const double dx = cfg.X / static_cast<double>(cfg.N);

    Trajectory traj;
    traj.config = cfg;
    PdeState st{0.0, cfg.dt, initial.ys};
    const double mass0 = sum(st.h) * dx;

    auto profile_of = [&](const PdeState& s) {
        Profile pr = Profile::periodic_grid(cfg.X, cfg.N, "pde");
        pr.ys = s.h;
        return pr;
    };
    auto record = [&](const PdeState& s, double e) {
        SeriesPoint sp;
        sp.t = s.t;
        sp.mass = sum(s.h) * dx;
        sp.energy = e;
        sp.min_h = *std::min_element(s.h.begin(), s.h.end());
        sp.dissipation = discrete_dissipation(s.h, cfg.X, p);
        traj.series.push_back(sp);
    };

    double e_prev = discrete_energy(st.h, cfg.X, p);
    record(st, e_prev);
    traj.snapshots.push_back({0.0, profile_of(st)});
    double next_snapshot = cfg.snapshot_interval;
    int quiet = 0;
    bool last_recorded = true;

    while (true) {
        if (st.t >= cfg.t_end * (1.0 - 1e-14)) {
            traj.termination = Termination::EndTime;
            break;
        }
        if (traj.accepted_steps >= cfg.max_steps) {
            traj.termination = Termination::MaxSteps;
            break;
        }
        st.dt = std::min(st.dt, cfg.t_end - st.t);
        const StepResult r = step(st, cfg);
        traj.rejected_steps += static_cast<std::size_t>(r.rejections);
        if (r.event == StepEvent::StepTooSmall) {
            // A collapsing step while the film thins is the signature of finite-time rupture.
            const double hmin = *std::min_element(st.h.begin(), st.h.end());
            traj.termination = hmin < 1e-2 * initial.min() ? Termination::NearRupture : Termination::StepTooSmall;
            break;
        }
        if (r.dt_taken == 0.0) {  // already at the floor
            traj.termination = Termination::NearRupture;
            break;
        }
        ++traj.accepted_steps;
        traj.max_energy_increase = std::max(traj.max_energy_increase, r.energy - e_prev);
        e_prev = r.energy;
        st = r.state;
        traj.max_mass_drift = std::max(traj.max_mass_drift, std::abs(sum(st.h) * dx - mass0) / mass0);
        last_recorded = traj.accepted_steps % cfg.series_stride == 0;
        if (last_recorded) record(st, r.energy);
        if (st.t >= next_snapshot) {
            traj.snapshots.push_back({st.t, profile_of(st)});
            next_snapshot += cfg.snapshot_interval;
        }
        if (r.event == StepEvent::NearRupture) {
            traj.termination = Termination::NearRupture;
            break;
        }
        const double hmax = *std::max_element(st.h.begin(), st.h.end());
        quiet = r.rate < cfg.steady_tol * hmax ? quiet + 1 : 0;
        if (quiet >= cfg.steady_count) {
            traj.termination = Termination::Steady;
            break;
        }
    }
    if (!last_recorded) record(st, e_prev);
    if (traj.snapshots.back().t != st.t) traj.snapshots.push_back({st.t, profile_of(st)});
    return traj;
}

Profile direction_profile(const SteadyState& ss, const Direction& dir, std::size_t N) {
    const Profile base = sample_on_periodic_grid(ss, N);
    Profile u = Profile::periodic_grid(base.length, N, "direction");
    const bool smooth = std::holds_alternative<PeriodicState>(ss) || std::holds_alternative<ConstantState>(ss);
    switch (dir.kind) {
    case DirectionKind::HPrime:
    case DirectionKind::HSecond:
        if (!smooth) throw ValidationError("h' and h'' directions need a smooth periodic state");
        if (std::holds_alternative<ConstantState>(ss)) throw ValidationError("h' and h'' vanish for a constant state");
        u.ys = dir.kind == DirectionKind::HPrime && base.dys.size() == N
                   ? base.dys
                   : spectral_derivative(base.ys, base.length, dir.kind == DirectionKind::HPrime ? 1 : 2);
        break;
    case DirectionKind::Kappa: {
        const auto* ps = std::get_if<PeriodicState>(&ss);
        if (!ps) throw ValidationError("kappa direction needs a periodic state");
        u.ys = kappa_direction(ps->alpha, ps->params.q, N).ys;
        break;
    }
    case DirectionKind::Sine:
        if (dir.wavenumber < 1) throw ValidationError("sine wavenumber must be positive");
        for (std::size_t j = 0; j < N; ++j) u.ys[j] = std::sin(2.0 * kPi * dir.wavenumber * u.xs[j] / u.length);
        break;
    case DirectionKind::Custom:
        if (dir.custom.size() != N) throw ValidationError("custom direction must have N samples");
        u.ys = dir.custom.ys;
        break;
    }
    const double mean = sum(u.ys) / static_cast<double>(N);
    for (double& v : u.ys) v -= mean;
    double l2 = 0.0;
    for (double v : u.ys) l2 += v * v;
    l2 = std::sqrt(l2 * base.length / static_cast<double>(N));
    if (!(l2 > 1e-300)) throw ValidationError("direction has zero mean-free part");
    for (double& v : u.ys) v /= l2;
    return u;
}

Profile perturb(const SteadyState& ss, const Direction& dir, double eps, std::size_t N) {
    Profile h = sample_on_periodic_grid(ss, N);
    h.dys.clear();
    h.meta = "perturbed";
    if (eps == 0.0) return h;
    const Profile u = direction_profile(ss, dir, N);
    for (std::size_t j = 0; j < N; ++j) h.ys[j] += eps * u.ys[j];
    if (!(h.min() > 0.0)) throw ValidationError("perturbed profile is not positive; use a smaller eps");
    return h;
}

LimitMatch detect_limit(const Trajectory& traj, const std::vector<SteadyState>& candidates) {
    LimitMatch best;
    // Touching down is reported as rupture; only states that themselves touch zero
    // (droplets) remain admissible limits then.
    best.rupture = traj.termination == Termination::NearRupture || traj.termination == Termination::StepTooSmall;
    if (best.rupture) best.kind = "rupture";
    const Profile& h = traj.final_profile();
    const std::size_t N = h.size();
    const double X = h.length;
    const double dx = X / static_cast<double>(N);

    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const SteadyState& cand = candidates[c];
        const bool touches_zero =
            std::holds_alternative<DropletState>(cand) || std::holds_alternative<DropletConfiguration>(cand);
        if (best.rupture && !touches_zero) {
            best.distances.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        if (const auto* ps = std::get_if<PeriodicState>(&cand)) {
            const double ratio = X / ps->X;
            if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
                throw ValidationError("candidate period does not divide the domain");
            }
        }
        auto distance_at = [&](double shift) {
            std::vector<double> xs(h.xs);
            for (double& x : xs) x -= shift;
            const std::vector<double> v = state_values(cand, X, xs);
            double num = 0.0, den = 0.0;
            for (std::size_t j = 0; j < N; ++j) {
                num += (h.ys[j] - v[j]) * (h.ys[j] - v[j]);
                den += v[j] * v[j];
            }
            return std::sqrt(num / den);
        };
        // integer shifts by circular correlation, then a continuous refinement
        const std::vector<double> v0 = state_values(cand, X, h.xs);
        std::size_t jbest = 0;
        double dbest = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < N; ++s) {
            double num = 0.0;
            for (std::size_t j = 0; j < N; ++j) {
                const double diff = h.ys[j] - v0[(j + N - s) % N];
                num += diff * diff;
            }
            if (num < dbest) {
                dbest = num;
                jbest = s;
            }
        }
        const double s0 = static_cast<double>(jbest) * dx;
        const auto [shift, dist] =
            boost::math::tools::brent_find_minima(distance_at, s0 - dx, s0 + dx, 40);
        best.distances.push_back(dist);
        if (dist < best.distance) {
            best.distance = dist;
            best.index = c;
            best.kind = kind_name(cand);
            best.shift = std::fmod(shift + X, X);
        }
    }
    return best;
}

void write_series_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,mass,energy,min_h,dissipation\n";
    char buf[256];
    for (const SeriesPoint& s : traj.series) {
        std::snprintf(buf, sizeof buf, "%.12e,%.15e,%.15e,%.12e,%.12e\n", s.t, s.mass, s.energy, s.min_h,
                      s.dissipation);
        os << buf;
    }
}

void write_profile_csv(std::ostream& os, const Profile& p) {
    os << "x,h\n";
    char buf[128];
    for (std::size_t j = 0; j < p.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.12e,%.15e\n", p.xs[j], p.ys[j]);
        os << buf;
    }
}

}  // namespace thinfilm
