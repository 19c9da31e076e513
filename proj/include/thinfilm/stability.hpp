#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "thinfilm/params.hpp"
#include "thinfilm/profile.hpp"
#include "thinfilm/steady_states.hpp"

namespace thinfilm {

/// Which antiderivative pair enters the energy. They differ by a linear
/// function, so energy differences at equal mass agree.
enum class Normalization { H, G };

/// E(h) = int [ (1/2) h'^2 - bond * Phi(h) ] dx with Phi = H or G (Phi'' = y^(q-1)).
/// Uses exact derivative samples when present; otherwise spectral derivatives
/// for smooth positive periodic data and centred differences for anything else.
double energy(const Profile& h, const OscillatorParams& params, Normalization norm = Normalization::H);

/// Energy of a droplet over its support by graded Gauss-Legendre quadrature in x,
/// resolving the contact-line behaviour. Zero outside the support for q > -1.
double droplet_energy(const DropletState& d, Normalization norm = Normalization::G);

/// First four derivatives in eps of E(h + eps u) at eps = 0.
struct VariationReport {
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
    double d4 = 0.0;
    double scale2 = 0.0;  ///< int u'^2 + bond |r(h)| u^2, the size of the d2 terms
    std::string label;
};

/// Requires a periodic h and a zero-mean u sampled on the same grid.
VariationReport variations(const Profile& h, const Profile& u, const OscillatorParams& params,
                           std::string label = {});

/// True when the variations show instability: d2 < 0, or d2 = 0 and d3 < 0, or
/// d2 = d3 = 0 and d4 < 0. "= 0" means within rel_zero of the natural scale.
bool unstable_sign_pattern(const VariationReport& v, double rel_zero = 1e-7);

enum class Discretization { Spectral, FiniteDifference };

struct Tau1Result {
    double tau1 = 0.0;
    Profile eigenfunction;  ///< zero mean, unit L2 norm
};

/// Smallest eigenvalue of u -> -u'' - bond r(h) u on zero-mean X-periodic functions.
/// `even_only` restricts to functions even about x = 0 (the Neumann problem on [0, X/2]).
Tau1Result tau1(const Profile& h, const OscillatorParams& params,
                Discretization disc = Discretization::Spectral, bool even_only = false);

enum class VerdictKind { EnergyUnstable, EnergyStable, NeutralFamily, LocalMinimum, Undetermined };

std::string verdict_name(VerdictKind k);

struct Witness {
    std::string label;
    Profile direction;
    VariationReport variations;
};

struct StabilityVerdict {
    VerdictKind kind = VerdictKind::Undetermined;
    std::string theorem;
    double tau1 = std::numeric_limits<double>::quiet_NaN();
    double mu1 = std::numeric_limits<double>::quiet_NaN();
    double dE = std::numeric_limits<double>::quiet_NaN();
    double X = 0.0;
    bool neumann = false;
    std::vector<Witness> witnesses;  ///< first entry is the primary witness
    Profile eigenfunction;
    std::string note;
};

struct ClassifyOptions {
    std::optional<double> at_period;  ///< analyse at this period (an integer multiple of the least period)
    bool neumann = false;             ///< only even witnesses
    std::size_t npoints = 256;
    double tau_tol = 1e-7;            ///< relative to (2 pi / X)^2 + max bond r(h)
    double dE_rel_tol = 1e-6;
};

StabilityVerdict classify(const SteadyState& ss, const ClassifyOptions& opt = {});

struct OddPerturbationCheck {
    bool applicable = false;  ///< 1 < q < 2, u odd about the minimum, h + u > 0
    double energy_change = 0.0;
    bool energy_increases = false;
};

/// Evaluates E(h + u) - E(h) for an odd perturbation of a periodic state with its minimum at x = 0.
OddPerturbationCheck odd_perturbation_check(const Profile& h, const Profile& u, const OscillatorParams& params);

}  // namespace thinfilm
