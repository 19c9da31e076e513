#pragma once

#include <json.hpp>

#include "thinfilm/energy_levels.hpp"
#include "thinfilm/oscillator.hpp"
#include "thinfilm/pde_solver.hpp"
#include "thinfilm/stability.hpp"
#include "thinfilm/steady_states.hpp"

namespace thinfilm {

inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::json;

/// Non-finite values become null.
Json number(double v);

Json to_json(const OscillatorParams& p);
Json to_json(const AlphaMaps& m);
/// Samples are included only when asked; they dominate the size.
Json to_json(const Profile& p, bool with_samples);
Json to_json(const SteadyState& s, bool with_samples = false);
Json to_json(const StabilityVerdict& v, bool with_samples = false);
Json to_json(const LevelReport& r);
Json to_json(const CrossingsReport& r);
Json to_json(const TangoReport& t);
Json to_json(const PdeConfig& c);
Json to_json(const LimitMatch& m);
/// Run manifest: configuration, termination, step counts and invariant diagnostics.
Json manifest(const Trajectory& t);

/// Adds "tool_version" to an object.
Json stamped(Json j);

}  // namespace thinfilm
