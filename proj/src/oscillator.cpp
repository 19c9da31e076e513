#include "thinfilm/oscillator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "thinfilm/errors.hpp"
#include "thinfilm/potentials.hpp"

namespace thinfilm {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;

constexpr double kPi = std::numbers::pi;
constexpr double kOdeTol = 1e-13;

bool is_linear(double q) { return std::abs(q - 1.0) < 1e-12; }

void check_alpha(double alpha, double q, bool allow_zero) {
    if (!std::isfinite(alpha) || !std::isfinite(q)) throw ValidationError("alpha and q must be finite");
    if (!(alpha < 1.0)) throw ValidationError("alpha must be < 1");
    if (alpha < 0.0) throw ValidationError("alpha must be >= 0");
    if (alpha == 0.0 && (!allow_zero || q <= -1.0 + 1e-12)) {
        throw DomainError("alpha = 0 requires q > -1");
    }
}

/// k'' = -H'(k). Nonpositive k is clamped so trial stages of the stepper stay finite.
struct OscillatorRhs {
    double q;
    void operator()(const State& s, State& ds, double) const {
        const double k = s[0] > 0.0 ? s[0] : 1e-300;
        ds[0] = s[1];
        ds[1] = -eval_H_prime(k, q);
    }
};

auto make_stepper() {
    return odeint::make_controlled(kOdeTol, kOdeTol, odeint::runge_kutta_fehlberg78<State>());
}

/// H(alpha) - H(k) for k = alpha + (beta - alpha) sin^2(theta), accurate at both ends.
double drop_at(double alpha, double beta, double theta, double q) {
    const double w = beta - alpha;
    if (theta <= 0.25 * kPi) {
        const double s = std::sin(theta);
        return potential_drop(alpha, w * s * s, q);
    }
    const double c = std::cos(theta);
    const double e = w * c * c;
    return -potential_drop(beta - e, e, q);
}

template <std::size_t K>
QuadratureResult<K> checked(const QuadratureResult<K>& r, const QuadratureOptions& opt, const char* what) {
    if (!r.converged && !(r.achieved_rel_change <= opt.accept_tol)) {
        throw NumericalError(std::string(what) + ": quadrature did not converge (achieved relative change " +
                             std::to_string(r.achieved_rel_change) + ")");
    }
    return r;
}

/// Distance from a contact point of k_0 to where it reaches height k.
double contact_distance(double k, double q) {
    if (k <= 0.0) return 0.0;
    // u = k s^2 removes the square-root singularity at u = k and the algebraic one at 0.
    auto f = [&](double s) {
        const double u = k * s * s;
        const double drop = potential_drop(0.0, u, q);
        return std::array<double, 1>{drop > 0.0 ? 2.0 * k * s / std::sqrt(2.0 * drop) : 0.0};
    };
    QuadratureOptions opt;
    return checked(integrate_graded<1>(f, 0.0, 1.0, opt), opt, "contact distance").values[0];
}

}  // namespace

double beta_max(double alpha, double q) {
    check_alpha(alpha, q, true);
    if (is_linear(q)) return 2.0 - alpha;
    const double d_lo = 1.0 - alpha;
    double d_hi = 2.0 * d_lo;
    auto g = [&](double d) { return potential_drop(alpha, d, q); };
    int expand = 0;
    while (g(d_hi) > 0.0) {
        d_hi *= 2.0;
        if (++expand > 200) throw NumericalError("beta_max: no bracket for the turning point");
    }
    boost::math::tools::eps_tolerance<double> tol(52);
    std::uintmax_t iters = 200;
    const auto [lo, hi] = boost::math::tools::toms748_solve(g, d_lo, d_hi, g(d_lo), g(d_hi), tol, iters);
    return alpha + 0.5 * (lo + hi);
}

AlphaMaps period_area(double alpha, double q, const QuadratureOptions& opt) {
    check_alpha(alpha, q, true);
    AlphaMaps m;
    m.alpha = alpha;
    if (is_linear(q)) {
        m.beta = 2.0 - alpha;
        m.P = 2.0 * kPi;
        m.A = 2.0 * kPi;
        m.I2 = kPi * (1.0 - alpha) * (1.0 - alpha);
        m.E = 4.0 * kPi * kPi;
        return m;
    }
    const double beta = beta_max(alpha, q);
    const double w = beta - alpha;
    auto f = [&](double theta) {
        const double s = std::sin(theta);
        const double c = std::cos(theta);
        const double k = alpha + w * s * s;
        const double v = std::sqrt(2.0 * std::max(drop_at(alpha, beta, theta, q), 0.0));
        const double jac = 2.0 * w * s * c;
        const double dx = v > 0.0 ? jac / v : 0.0;
        return std::array<double, 3>{2.0 * dx, 2.0 * k * dx, 2.0 * v * jac};
    };
    const auto r = checked(integrate_graded<3>(f, 0.0, 0.5 * kPi, opt), opt, "period_area");
    m.beta = beta;
    m.P = r.values[0];
    m.A = r.values[1];
    m.I2 = r.values[2];
    m.E = std::pow(m.P, 3.0 - q) * std::pow(m.A, q - 1.0);
    m.achieved_tol = r.achieved_rel_change;
    return m;
}

double oscillator_moment(double alpha, double q, const std::function<double(double)>& weight,
                         const QuadratureOptions& opt) {
    check_alpha(alpha, q, true);
    const double beta = beta_max(alpha, q);
    const double w = beta - alpha;
    auto f = [&](double theta) {
        const double s = std::sin(theta);
        const double c = std::cos(theta);
        const double k = alpha + w * s * s;
        const double v = std::sqrt(2.0 * std::max(drop_at(alpha, beta, theta, q), 0.0));
        const double dx = v > 0.0 ? 2.0 * w * s * c / v : 0.0;
        return std::array<double, 1>{2.0 * weight(k) * dx};
    };
    return checked(integrate_graded<1>(f, 0.0, 0.5 * kPi, opt), opt, "oscillator_moment").values[0];
}

double E_of_alpha(double alpha, double q) { return period_area(alpha, q).E; }

namespace {
// B(x, 1/2) through a gamma ratio; std::beta loses digits once x is large (small q).
double beta_half(double x) { return std::sqrt(kPi) * boost::math::tgamma_delta_ratio(x, 0.5); }
double beta0_of(double q) { return std::exp(std::log1p(q) / q); }
}  // namespace

double P0_closed_form(double q) {
    if (!(q > 0.0)) throw DomainError("closed form of P(0) requires q > 0");
    const double beta = beta0_of(q);
    return 2.0 * std::sqrt(beta / (2.0 * q)) * beta_half(1.0 / (2.0 * q));
}

double A0_closed_form(double q) {
    if (!(q > 0.0)) throw DomainError("closed form of A(0) requires q > 0");
    const double beta = std::pow(q + 1.0, 1.0 / q);
    return 2.0 * beta * std::sqrt(beta / (2.0 * q)) * beta_half(3.0 / (2.0 * q));
}

double E0_closed_form(double q) {
    if (!(q > 0.0)) throw DomainError("closed form of E(0) requires q > 0");
    return (2.0 / q) * (1.0 + q) * std::pow(beta_half(1.0 / (2.0 * q)), 3.0 - q) *
           std::pow(beta_half(3.0 / (2.0 * q)), q - 1.0);
}

double default_alpha_step(double alpha) { return std::max(1e-5, 1e-3 * std::min(alpha, 1.0 - alpha)); }

AlphaDerivatives alpha_derivatives(double alpha, double q, double step, double identity_tol) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha_derivatives requires alpha in (0, 1)");
    const double h = step > 0.0 ? step : default_alpha_step(alpha);
    if (alpha - 2.0 * h <= 0.0 || alpha + 2.0 * h >= 1.0) {
        throw ValidationError("alpha_derivatives: stencil leaves (0, 1); reduce the step");
    }
    const AlphaMaps c = period_area(alpha, q);
    const AlphaMaps m2 = period_area(alpha - 2.0 * h, q);
    const AlphaMaps m1 = period_area(alpha - h, q);
    const AlphaMaps p1 = period_area(alpha + h, q);
    const AlphaMaps p2 = period_area(alpha + 2.0 * h, q);
    auto d = [h](double a, double b, double cc, double dd) { return (a - 8.0 * b + 8.0 * cc - dd) / (12.0 * h); };

    AlphaDerivatives out;
    out.step = h;
    out.dP = d(m2.P, m1.P, p1.P, p2.P);
    out.dA = d(m2.A, m1.A, p1.A, p2.A);
    out.dE = c.E * ((3.0 - q) * out.dP / c.P + (q - 1.0) * out.dA / c.A);

    if (std::abs(q + 1.0) > 1e-12) {
        const double Ha = eval_H(alpha, q);
        const double Hpa = eval_H_prime(alpha, q);
        const double t1 = -(q + 1.0) * Ha * out.dP;
        const double t2 = -0.5 * (q - 1.0) * Hpa * c.P;
        const double scale = std::abs(t1) + std::abs(t2) + std::abs(out.dA);
        out.A_identity_residual = scale > 0.0 ? std::abs(out.dA - t1 - t2) / scale : 0.0;

        // E' with A' eliminated through the identity.
        const double dE_id =
            c.E * ((3.0 - q) * out.dP / c.P + (q - 1.0) * (t1 + t2) / c.A);
        const double escale = std::abs(c.E * (3.0 - q) * out.dP / c.P) +
                              std::abs(c.E * (q - 1.0) * t1 / c.A) + std::abs(c.E * (q - 1.0) * t2 / c.A);
        out.E_identity_residual = escale > 0.0 ? std::abs(out.dE - dE_id) / escale : 0.0;

        if (out.A_identity_residual > identity_tol || out.E_identity_residual > identity_tol) {
            throw NumericalError("alpha_derivatives: A' identity residual " +
                                 std::to_string(out.A_identity_residual) + " exceeds tolerance at alpha=" +
                                 std::to_string(alpha) + ", q=" + std::to_string(q));
        }
    }
    return out;
}

AlphaMaps alpha_maps(double alpha, double q) {
    AlphaMaps m = period_area(alpha, q);
    const AlphaDerivatives d = alpha_derivatives(alpha, q);
    m.dP = d.dP;
    m.dA = d.dA;
    m.dE = d.dE;
    return m;
}

double measure_period_ode(double alpha, double q) {
    check_alpha(alpha, q, true);
    if (alpha == 0.0 && q <= 0.0) throw DomainError("ODE period at alpha = 0 requires q > 0");
    const OscillatorRhs rhs{q};
    auto stepper = make_stepper();
    State x{alpha, 0.0};
    double t = 0.0;
    double dt = 1e-3;
    bool rising = false;
    State prev = x;
    double tprev = t;
    for (long n = 0;; ++n) {
        if (n > 10000000 || t > 1e6) throw NumericalError("measure_period_ode: no turning point found");
        prev = x;
        tprev = t;
        int fails = 0;
        while (stepper.try_step(rhs, x, t, dt) == odeint::fail) {
            if (++fails > 1000) throw NumericalError("measure_period_ode: step size underflow");
        }
        if (x[1] > 0.0) {
            rising = true;
        } else if (rising) {
            break;
        }
    }
    // Newton on k'(tau) = 0 inside the last step; d/dtau k' = -H'(k).
    double tau = tprev;
    State s = prev;
    for (int it = 0; it < 50; ++it) {
        const double g = s[1];
        const double gp = -eval_H_prime(std::max(s[0], 1e-300), q);
        const double next = tau - g / gp;
        State y = prev;
        odeint::integrate_adaptive(stepper, rhs, y, tprev, next, std::max((next - tprev) * 0.1, 1e-12));
        const double change = std::abs(next - tau);
        tau = next;
        s = y;
        if (change < 1e-15 * tau) break;
    }
    return 2.0 * tau;
}

void sample_k(double alpha, double q, const std::vector<double>& xs, std::vector<double>& k,
              std::vector<double>& dk) {
    check_alpha(alpha, q, true);
    k.assign(xs.size(), 0.0);
    dk.assign(xs.size(), 0.0);
    if (xs.empty()) return;
    if (is_linear(q)) {
        for (std::size_t j = 0; j < xs.size(); ++j) {
            k[j] = 1.0 + (alpha - 1.0) * std::cos(xs[j]);
            dk[j] = -(alpha - 1.0) * std::sin(xs[j]);
        }
        return;
    }
    std::vector<double> times;
    times.reserve(xs.size() + 1);
    const bool prepend = xs.front() > 0.0;
    if (prepend) times.push_back(0.0);
    times.insert(times.end(), xs.begin(), xs.end());
    std::size_t idx = 0;
    auto observe = [&](const State& s, double) {
        if (prepend && idx == 0) {
            ++idx;
            return;
        }
        const std::size_t j = idx - (prepend ? 1 : 0);
        k[j] = s[0];
        dk[j] = s[1];
        ++idx;
    };
    State x{alpha, 0.0};
    auto stepper = make_stepper();
    odeint::integrate_times(stepper, OscillatorRhs{q}, x, times.begin(), times.end(), 1e-3, observe);
    for (double v : k) {
        if (!std::isfinite(v)) throw NumericalError("sample_k: ODE integration produced non-finite values");
    }
}

Profile profile_k(double alpha, double q, std::size_t npoints) {
    if (npoints < 16) throw ValidationError("profile_k needs at least 16 points");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("profile_k requires alpha in (0, 1)");
    const AlphaMaps m = period_area(alpha, q);
    if (!is_linear(q)) {
        const double p_ode = measure_period_ode(alpha, q);
        if (std::abs(p_ode - m.P) > 1e-8 * m.P) {
            throw NumericalError("profile_k: ODE period disagrees with quadrature period");
        }
    }
    Profile p = Profile::periodic_grid(m.P, npoints, "k_alpha");
    sample_k(alpha, q, p.xs, p.ys, p.dys);
    return p;
}

void sample_k0(double q, const std::vector<double>& xs, std::vector<double>& k, std::vector<double>& dk) {
    if (!(q > -1.0)) throw DomainError("zero-angle profile requires q > -1");
    const AlphaMaps m = period_area(0.0, q);
    const double half = 0.5 * m.P;
    k.assign(xs.size(), 0.0);
    dk.assign(xs.size(), 0.0);

    // Evaluate on the sorted distances from the maximum, then scatter back.
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < xs.size(); ++j)
        if (xs[j] > 0.0 && xs[j] < m.P) order.push_back(j);
    auto dist_of = [&](std::size_t j) { return std::abs(xs[j] - half); };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist_of(a) < dist_of(b); });
    std::vector<double> dist(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) dist[i] = dist_of(order[i]);

    std::vector<double> kv(dist.size(), 0.0), dkv(dist.size(), 0.0);
    if (is_linear(q)) {
        for (std::size_t i = 0; i < dist.size(); ++i) {
            kv[i] = 1.0 + std::cos(dist[i]);
            dkv[i] = -std::sin(dist[i]);
        }
    } else {
        const double k_switch = 1e-3 * m.beta;
        const double x_switch = half - contact_distance(k_switch, q);
        std::size_t n_ode = 0;
        while (n_ode < dist.size() && dist[n_ode] < x_switch) ++n_ode;
        if (n_ode > 0) {
            std::vector<double> times;
            const bool prepend = dist.front() > 0.0;
            if (prepend) times.push_back(0.0);
            times.insert(times.end(), dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(n_ode));
            std::size_t idx = 0;
            auto observe = [&](const State& s, double) {
                if (prepend && idx == 0) {
                    ++idx;
                    return;
                }
                const std::size_t j = idx - (prepend ? 1 : 0);
                kv[j] = s[0];
                dkv[j] = s[1];
                ++idx;
            };
            State x{m.beta, 0.0};
            auto stepper = make_stepper();
            odeint::integrate_times(stepper, OscillatorRhs{q}, x, times.begin(), times.end(), 1e-3, observe);
        }
        for (std::size_t j = n_ode; j < dist.size(); ++j) {
            const double c = half - dist[j];
            if (c <= 1e-14 * half) continue;  // contact point
            auto f = [&](double kk) { return contact_distance(kk, q) - c; };
            boost::math::tools::eps_tolerance<double> tol(50);
            std::uintmax_t iters = 200;
            const auto [lo, hi] = boost::math::tools::toms748_solve(f, 0.0, k_switch, -c, f(k_switch), tol, iters);
            kv[j] = 0.5 * (lo + hi);
            dkv[j] = -std::sqrt(2.0 * std::max(potential_drop(0.0, kv[j], q), 0.0));
        }
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::size_t j = order[i];
        k[j] = kv[i];
        dk[j] = xs[j] >= half ? dkv[i] : -dkv[i];
        if (!std::isfinite(k[j])) throw NumericalError("zero-angle profile: non-finite sample");
    }
}

Profile profile_k0(double q, std::size_t n_intervals) {
    if (n_intervals < 2) throw ValidationError("droplet profile needs at least 2 intervals");
    const AlphaMaps m = period_area(0.0, q);
    Profile p = Profile::interval_grid(m.P, n_intervals, "k_0");
    sample_k0(q, p.xs, p.ys, p.dys);
    if (n_intervals % 2 == 0) p.dys[n_intervals / 2] = 0.0;
    return p;
}

Profile kappa_direction(double alpha, double q, std::size_t npoints) {
    if (npoints < 8) throw ValidationError("kappa_direction needs at least 8 points");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("kappa_direction requires alpha in (0, 1)");
    const double h = default_alpha_step(alpha);
    if (alpha - 2.0 * h <= 0.0 || alpha + 2.0 * h >= 1.0) throw ValidationError("kappa_direction: alpha too close to the ends");
    Profile out = Profile::periodic_grid(1.0, npoints, "kappa_alpha");
    const double offsets[4] = {-2.0, -1.0, 1.0, 2.0};
    const double coef[4] = {1.0, -8.0, 8.0, -1.0};
    std::vector<double> acc(npoints, 0.0);
    for (int s = 0; s < 4; ++s) {
        const double a = alpha + offsets[s] * h;
        const AlphaMaps m = period_area(a, q);
        std::vector<double> xs(npoints), k, dk;
        for (std::size_t j = 0; j < npoints; ++j) xs[j] = m.P * out.xs[j];
        sample_k(a, q, xs, k, dk);
        for (std::size_t j = 0; j < npoints; ++j) acc[j] += coef[s] * (m.P / m.A) * k[j];
    }
    for (std::size_t j = 0; j < npoints; ++j) out.ys[j] = acc[j] / (12.0 * h);
    return out;
}

}  // namespace thinfilm
