#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "thinfilm/oscillator.hpp"
#include "thinfilm/params.hpp"
#include "thinfilm/profile.hpp"

namespace thinfilm {

struct ConstantState {
    OscillatorParams params;
    double hbar = 1.0;
    double X = 1.0;
};

/// Positive periodic steady state h(x) = c k_alpha(P x / X), c = (A_ss/A)(P/X).
struct PeriodicState {
    OscillatorParams params;
    double alpha = 0.0;
    double D = 0.0;
    double X = 0.0;
    double A_ss = 0.0;
    double amplitude = 0.0;  ///< c
    AlphaMaps maps;
    Profile profile;
    /// Set for q = 1, where every alpha gives a steady state of the same period and area.
    bool degenerate_family = false;
    double invariance_residual = 0.0;
};

/// Zero-contact-angle droplet h(x) = c k_0(P(0) (x - offset) / X_hat) on [offset, offset + X_hat].
struct DropletState {
    OscillatorParams params;
    double X_hat = 0.0;
    double A_hat = 0.0;
    double offset = 0.0;
    double amplitude = 0.0;
    AlphaMaps maps0;  ///< maps at alpha = 0
    Profile profile;  ///< closed-interval samples on [0, X_hat]
    double endpoint_slope = 0.0;
};

struct DropletConfiguration {
    double X = 0.0;  ///< container length
    std::vector<DropletState> droplets;
};

using SteadyState = std::variant<ConstantState, PeriodicState, DropletState, DropletConfiguration>;

std::string kind_name(const SteadyState& s);

/// Physical size of a periodic steady state: either the constant D of
///   h'' + (bond h^q - D)/q = 0   (h'' + bond log h - D = 0 when q = 0)
/// or a period X and area A_ss.
struct RescaleTarget {
    std::optional<double> D;
    std::optional<double> X;
    std::optional<double> A_ss;
};

/// Default tolerance on bond X^(3-q) A_ss^(q-1) = E(alpha).
inline constexpr double kInvarianceTol = 1e-8;

PeriodicState rescale_to_physical(double alpha, const OscillatorParams& params, const RescaleTarget& target,
                                  std::size_t npoints = 256);

/// Inverse map: canonical samples k(P x / X) = h(x) / c recovered from a periodic state.
std::vector<double> normalize_to_canonical(const PeriodicState& s);

struct PeriodicSearch {
    std::vector<PeriodicState> states;
    double target_E = 0.0;
    std::optional<double> alpha_crit;  ///< interior minimiser of E when one is found
    std::optional<double> E_min;
    bool degenerate_family = false;
    std::vector<std::string> warnings;
};

/// All alpha in (0, 1) with E(alpha) = bond X^(3-q) A_ss^(q-1), ordered by alpha.
PeriodicSearch construct_periodic(const OscillatorParams& params, double X, double A_ss, std::size_t npoints = 256);

/// Droplet of area A_ss and length X_hat = [E(0) / (bond A_ss^(q-1))]^(1/(3-q)); q in (-1, 3).
DropletState construct_droplet(const OscillatorParams& params, double A_ss, std::size_t n_intervals = 256);

/// Rescaled k_0 of area A_hat on a support of prescribed length (any q > -1).
DropletState droplet_with_length(const OscillatorParams& params, double A_hat, double X_hat,
                                 std::size_t n_intervals = 256);

/// Droplet heights at arbitrary points (zero off the support).
std::vector<double> droplet_values(const DropletState& d, const std::vector<double>& xs);
void droplet_samples(const DropletState& d, const std::vector<double>& xs, std::vector<double>& h,
                     std::vector<double>& dh);

struct DropletExistence {
    bool exists = false;
    double lhs = 0.0;  ///< bond hbar^(q-1) X^2
    double E0 = 0.0;
    std::optional<double> X_hat;
    std::string reason;
};

/// Whether a zero-angle droplet of area hbar X fits in a period X.
DropletExistence droplet_exists(const OscillatorParams& params, double hbar, double X);

/// Places droplets at the given offsets in a container of length X; supports must be disjoint.
DropletConfiguration assemble_configuration(double X, std::vector<DropletState> droplets,
                                            const std::vector<double>& offsets);

/// Samples any steady state on N uniform points of [0, X) (periodic grid).
Profile sample_on_periodic_grid(const SteadyState& s, std::size_t n);

/// Heights at arbitrary x. Periodic states repeat with their own period; droplets
/// and configurations repeat with `domain` (their container length).
std::vector<double> state_values(const SteadyState& s, double domain, const std::vector<double>& xs);

}  // namespace thinfilm
