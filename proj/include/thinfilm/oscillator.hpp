#pragma once

#include <cstddef>
#include <functional>
#include <limits>

#include "thinfilm/profile.hpp"
#include "thinfilm/quadrature.hpp"

namespace thinfilm {

/// Period, area and gradient energy of the canonical oscillator k_alpha,
///   k'' + (k^q - 1)/q = 0   (k'' + log k = 0 when q = 0),
///   k(0) = alpha, k'(0) = 0,
/// together with E = P^(3-q) A^(q-1). Derivative fields are NaN unless filled
/// by alpha_maps().
struct AlphaMaps {
    double alpha = 0.0;
    double beta = 0.0;  ///< maximum of k_alpha
    double P = 0.0;     ///< least period
    double A = 0.0;     ///< area over one period
    double I2 = 0.0;    ///< integral of (k')^2 over one period
    double E = 0.0;
    double dP = std::numeric_limits<double>::quiet_NaN();
    double dA = std::numeric_limits<double>::quiet_NaN();
    double dE = std::numeric_limits<double>::quiet_NaN();
    double achieved_tol = 0.0;
};

/// Turning point beta > 1 of the conserved oscillator: H(beta) = H(alpha).
double beta_max(double alpha, double q);

/// P, A and I2 by quadrature after the substitution k = alpha + (beta - alpha) sin^2(theta),
/// which removes both inverse-square-root endpoint singularities.
/// q = 1 returns the closed form P = A = 2 pi, I2 = pi (1 - alpha)^2.
AlphaMaps period_area(double alpha, double q, const QuadratureOptions& opt = {});

/// Integral over one period of w(k_alpha(x)), computed in the k variable.
double oscillator_moment(double alpha, double q, const std::function<double(double)>& weight,
                         const QuadratureOptions& opt = {});

double E_of_alpha(double alpha, double q);

/// E(0) = (2/q)(1+q) B(1/(2q), 1/2)^(3-q) B(3/(2q), 1/2)^(q-1), valid for q > 0.
double E0_closed_form(double q);
/// P(0) and A(0) in Beta-function form, q > 0.
double P0_closed_form(double q);
double A0_closed_form(double q);

struct AlphaDerivatives {
    double dP = 0.0;
    double dA = 0.0;
    double dE = 0.0;
    double step = 0.0;
    double A_identity_residual = 0.0;  ///< relative residual of the A' identity
    double E_identity_residual = 0.0;  ///< relative residual of the E' identity
};

/// Default finite-difference step max(1e-5, 1e-3 min(alpha, 1 - alpha)).
double default_alpha_step(double alpha);

/// Centered 4-point differences of period_area in alpha, validated against
///   A' = -(q+1) H(alpha) P' - ((q-1)/2) H'(alpha) P
/// and the matching E' expression. Throws NumericalError when a residual
/// exceeds `identity_tol` (skipped for q = -1, where the identity does not apply).
AlphaDerivatives alpha_derivatives(double alpha, double q, double step = 0.0,
                                   double identity_tol = 1e-5);

/// period_area plus derivatives.
AlphaMaps alpha_maps(double alpha, double q);

/// Least period of k_alpha measured by integrating the oscillator ODE until k'
/// vanishes at the maximum (twice the half period). Independent of the quadrature.
double measure_period_ode(double alpha, double q);

/// Samples of k_alpha on N uniform points of one least period, first sample at
/// the minimum. Values and exact derivatives come from a high-order ODE
/// integration; the measured period must match the quadrature period to 1e-8.
Profile profile_k(double alpha, double q, std::size_t npoints);

/// k_alpha and k_alpha' at arbitrary abscissae (sorted ascending, >= 0).
void sample_k(double alpha, double q, const std::vector<double>& xs, std::vector<double>& k,
              std::vector<double>& dk);

/// Zero-contact-angle profile k_0 on [0, P(0)] with n_intervals + 1 samples
/// (q in (-1, infinity)). Integrated outward from the maximum; the last stretch
/// near each contact point is filled by inverting the contact-distance quadrature.
Profile profile_k0(double q, std::size_t n_intervals);

/// k_0 and k_0' at arbitrary abscissae of [0, P(0)]; zero outside the support.
void sample_k0(double q, const std::vector<double>& xs, std::vector<double>& k, std::vector<double>& dk);

/// kappa_alpha = d/d(alpha) of K_alpha(x) = (P/A) k_alpha(P x) on N points of [0, 1),
/// by a centered 4-point difference at fixed x. Zero mean, even in x.
Profile kappa_direction(double alpha, double q, std::size_t npoints);

}  // namespace thinfilm
