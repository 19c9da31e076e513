#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "thinfilm/params.hpp"
#include "thinfilm/profile.hpp"
#include "thinfilm/steady_states.hpp"

namespace thinfilm {

/// Periodic finite-difference run of h_t = -(h^n h_xxx)_x - bond (h^m h_x)_x.
struct PdeConfig {
    OscillatorParams params;
    std::size_t N = 128;
    double X = 1.0;
    double dt = 1e-4;       ///< first step
    double t_end = 1e3;
    double theta = 1.0;     ///< weight of the implicit part of the destabilising term
    /// Stop with NearRupture once min h falls to this; NaN means 1e-6 of the initial mean.
    double positivity_floor = std::numeric_limits<double>::quiet_NaN();
    double dt_max = 1e4;
    double dt_min = 1e-16;
    double max_rel_change = 0.05;   ///< per step, relative to max h
    double max_thinning = 0.2;      ///< largest fraction of its height a node may lose in one step
    double steady_tol = 1e-9;       ///< on ||h_t||_inf / max h
    int steady_count = 10;
    std::size_t max_steps = 2'000'000;
    double snapshot_interval = std::numeric_limits<double>::infinity();  ///< in t; first and last are always kept
    std::size_t series_stride = 1;  ///< record every k-th accepted step (plus the last)

    void validate() const;
};

enum class StepEvent { Accepted, NearRupture, StepTooSmall };

struct PdeState {
    double t = 0.0;
    double dt = 0.0;   ///< step to attempt next
    std::vector<double> h;
};

struct StepResult {
    PdeState state;
    StepEvent event = StepEvent::Accepted;
    double dt_taken = 0.0;
    double energy = 0.0;
    double rate = 0.0;  ///< ||h_t||_inf over the accepted step
    int rejections = 0;
};

/// Discrete energy sum dx [ (1/2) (D+ h)^2 - bond H(h) ], the Liapunov function of the scheme.
double discrete_energy(const std::vector<double>& h, double X, const OscillatorParams& params);
/// sum dx h_{j+1/2}^n (D+ mu)^2 with mu the discrete chemical potential.
double discrete_dissipation(const std::vector<double>& h, double X, const OscillatorParams& params);

/// Newton solve of the scheme's own steady equations (discrete chemical potential
/// constant, mass fixed) from a nearby periodic profile, e.g. a sampled exact steady
/// state. Perturbation experiments start here so that eps, not the O(dx^2) mismatch
/// between the exact and discrete states, selects the direction of departure.
Profile discrete_steady_state(const Profile& guess, const OscillatorParams& params, double tol = 1e-12);

/// One accepted step (halving dt on a failed solve, lost positivity, an energy
/// increase or too large a change). Flux form, so mass is conserved to round-off.
StepResult step(const PdeState& s, const PdeConfig& cfg);

enum class Termination { EndTime, Steady, NearRupture, StepTooSmall, MaxSteps };
std::string termination_name(Termination t);

struct SeriesPoint {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double min_h = 0.0;
    double dissipation = 0.0;
};

struct Snapshot {
    double t = 0.0;
    Profile h;
};

struct Trajectory {
    PdeConfig config;
    std::vector<Snapshot> snapshots;
    std::vector<SeriesPoint> series;
    Termination termination = Termination::EndTime;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    double max_energy_increase = 0.0;  ///< largest E(k+1) - E(k) over accepted steps
    double max_mass_drift = 0.0;       ///< relative to the initial mass
    const Profile& final_profile() const { return snapshots.back().h; }
};

Trajectory evolve(const Profile& initial, const PdeConfig& cfg);

enum class DirectionKind { HPrime, HSecond, Kappa, Sine, Custom };

struct Direction {
    DirectionKind kind = DirectionKind::HSecond;
    int wavenumber = 1;      ///< Sine: sin(2 pi k x / X)
    Profile custom;          ///< Custom: samples on the target grid
};

/// Zero-mean, unit-L2 direction on N points of the state's period.
Profile direction_profile(const SteadyState& ss, const Direction& dir, std::size_t N);

/// h_ss + eps u on N points; u normalised as in direction_profile.
Profile perturb(const SteadyState& ss, const Direction& dir, double eps, std::size_t N);

struct LimitMatch {
    bool rupture = false;
    std::optional<std::size_t> index;  ///< into the candidate list
    std::string kind;
    double distance = std::numeric_limits<double>::infinity();  ///< relative L2
    double shift = 0.0;  ///< final(x) ~ candidate(x - shift)
    std::vector<double> distances;     ///< per candidate, at its best shift
};

/// Closest candidate to the final profile over all translations. After a touchdown
/// (NearRupture, StepTooSmall) only droplet candidates are considered.
LimitMatch detect_limit(const Trajectory& traj, const std::vector<SteadyState>& candidates);

/// t, mass, energy, min_h, dissipation.
void write_series_csv(std::ostream& os, const Trajectory& traj);
/// x, h.
void write_profile_csv(std::ostream& os, const Profile& p);

}  // namespace thinfilm
