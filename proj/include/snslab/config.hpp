#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "snslab/dynamics.hpp"
#include "snslab/toy.hpp"

namespace snslab {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Distinguishes "the input was malformed" from numerical failures so callers
// can map it to a usage exit code.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parses and checks schema_version; unknown top-level keys are rejected so a
// typo cannot silently fall back to defaults.
json load_config_file(const std::string& path);

// forcing: {"form": "four_mode", "energy_rate": E0}
//        | {"form": "power_law", "alpha": a, "radius": r, "energy_rate": E0}
//        | {"form": "real",    "modes": [[k1, k2, amp_cos, amp_sin], ...]}
//        | {"form": "complex", "modes": [[k1, k2, re, im], ...]}
ForcingSpec forcing_from_json(const json& j);
json forcing_to_json(const ForcingSpec& spec); // real form

// solver: {"resolution": n, "nu": .., "dt": .., "forcing": {...},
//          "dealias_cutoff": optional, "blowup_threshold": optional}
SolverConfig solver_from_json(const json& j);
json solver_to_json(const SolverConfig& cfg);

// toy: any of nu1, nu2, sigma1, sigma2, a, b, c, dt (defaults otherwise);
// only the built-in drift family round-trips.
ToyConfig toy_from_json(const json& j);
json toy_to_json(const ToyConfig& cfg);

// FNV-1a over the canonical (key-sorted) dump.
std::uint64_t config_hash(const json& j);

} // namespace snslab
