#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "thinfilm/params.hpp"
#include "thinfilm/stability.hpp"
#include "thinfilm/steady_states.hpp"

namespace thinfilm {

/// F(alpha) = (A/P)^-(q+1) [ I2/P - H(alpha) + H(A/P) ], the scaled energy excess of
/// k_alpha over its mean. Zero for q = 1.
double F_of_alpha(double alpha, double q);

struct FPrimeCheck {
    double dF = 0.0;          ///< finite difference of F
    double predicted = 0.0;   ///< -(1/2) P^-3 (A/P)^-2q I2 E'
    double dE = 0.0;
    double residual = 0.0;    ///< relative
};

FPrimeCheck F_prime_identity(double alpha, double q);

/// G-normalised energy integral of k_alpha over one period scaled by A^((q+3)/(q-3))
/// (plus (2/3) log A at q = 0); alpha = 0 uses the droplet k_0. q != 3.
double G_script(double alpha, double q);
/// Closed form of G_script in terms of P, A and H(alpha) (q != 3, 0, -1, -3; q = 0 has its own form).
double G_script_identity(double alpha, double q);
/// G_script' = H(alpha) A^(6/(q-3)) (A/P)^(2-q) E' / (q - 3).
double G_script_prime(double alpha, double q);

/// L(q) = A(0)^2 [(3+q)/((3-q)(q+1))]^((3-q)/q), L(0) = 4 e^2 pi / 3; q in (-1, 3).
double L_of_q(double q);
/// E(0) for any q > -1 (closed form for q > 0, quadrature otherwise).
double E0_of_q(double q);

/// J(q) = E(0)/(4 pi^2), q in (1, 1.75].
double J_of_q(double q);
struct JBounds {
    double low_interval = 0.0;   ///< bound on (1, 1.5]
    double high_interval = 0.0;  ///< bound on (1.5, 1.75]
};
/// Monotone Beta-function bounds of J on the two subintervals.
JBounds J_bounds();

enum class Ordering { Lower, Equal, Higher, Undetermined };
std::string ordering_name(Ordering o);

/// Energy comparison of two states; ordering describes the first relative to the second.
struct LevelReport {
    std::string first;
    std::string second;
    double delta_energy = std::numeric_limits<double>::quiet_NaN();   ///< direct grid/quadrature route
    double delta_formula = std::numeric_limits<double>::quiet_NaN();  ///< scaling or closed-form route
    Ordering ordering = Ordering::Undetermined;
    std::string theorem;
    std::string reason;
    std::optional<std::string> expected;  ///< ordering predicted by the theorem's hypotheses, if any
    bool consistent = true;               ///< ordering matches the expectation
    std::map<std::string, double> diagnostics;
};

/// Sign of E' sampled on npts points of (a, b).
struct DESign {
    bool all_positive = false;
    bool all_negative = false;
    double min_dE = 0.0;
    double max_dE = 0.0;
};
DESign sample_dE_sign(double q, double a, double b, int npts = 200);

/// Periodic state against its mean (first = periodic, second = constant).
LevelReport compare_periodic_constant(const PeriodicState& ss);

/// Zero-angle droplet of the same area against the periodic state (first = droplet).
LevelReport compare_periodic_droplet(const PeriodicState& ss);

/// Zero-angle droplet of area hbar X against the constant hbar (first = droplet).
LevelReport compare_constant_droplet(const OscillatorParams& params, double hbar, double X);

/// E(hat h) - E(hbar) by the closed form, q > -1.
double constant_droplet_difference(const OscillatorParams& params, double hbar, double X);

struct Crossing {
    std::string curves;
    double q = 0.0;
    double value = 0.0;
};

struct CrossingsReport {
    std::vector<Crossing> crossings;
    double q_near_3 = 0.0;
    double E0_near_3 = 0.0;
    double L_near_3 = 0.0;
};

/// Intersections of E0(q), L(q) and 4 pi^2 on (-1, 3).
CrossingsReport crossings_report();

struct TangoReport {
    PeriodicState ss1;
    PeriodicState ss2;
    StabilityVerdict verdict1;
    StabilityVerdict verdict2;
    double energy1 = 0.0;
    double energy2 = 0.0;
    double energy_constant = 0.0;
    double alpha_crit = 0.0;
    bool delta_decreasing = false;  ///< (1/2) P^3 A^-2 I2 strictly decreasing in alpha
    bool alphaP_increasing = false; ///< alpha P^(2/(q-1)) strictly increasing
};

/// Two periodic states of the same period and area for 1 < q < 2.
TangoReport two_state_tango(const OscillatorParams& params, double X, double A_ss, std::size_t npoints = 256);

/// alpha, P, A, I2, E, dE, F rows for one q.
void write_alpha_table(std::ostream& os, double q, const std::vector<double>& alphas);
/// q, E0, L, J rows (blank where undefined).
void write_q_table(std::ostream& os, const std::vector<double>& qs);

}  // namespace thinfilm
