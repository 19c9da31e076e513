#pragma once

namespace thinfilm {

/// Oscillator potentials for r(y) = y^(q-1), normalised so that H'' = G'' = r.
///
///   H(y) = (1/q)[y^(q+1)/(q+1) - y]   q != 0, -1
///          y log y - y                 q = 0
///          y - log y                   q = -1
///
///   G(y) = y^(q+1) / (q(q+1)),  y log y - y,  -log y   (same branches)
///
/// H and G differ by a linear function. For q > -1 both vanish at y = 0.
/// |q| < 1e-12 selects the logarithmic branch, |q + 1| < 1e-12 the q = -1 one.

struct PotentialValue {
    double H;
    double G;
    double r;
};

enum class Branch { Power, Log, InverseLog };

Branch branch_of(double q);

double eval_H(double y, double q);
double eval_H_prime(double y, double q);
double eval_G(double y, double q);
double eval_G_prime(double y, double q);
PotentialValue potential(double y, double q);

double eval_r(double y, double q);
double eval_r_prime(double y, double q);
double eval_r_second(double y, double q);

/// H(a) - H(a + d) for a >= 0, d >= 0, evaluated without subtracting two
/// values of H, so the relative accuracy is set by d rather than by |H(a)|.
double potential_drop(double a, double d, double q);

}  // namespace thinfilm
