#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "starbsde/driver.hpp"
#include "starbsde/lattice.hpp"

namespace starbsde {

/// Parsed experiment description. The config format is JSON with nested
/// keys; the grammar is documented in the README. Validation failures throw
/// ValidationError with a path-to-field message.
struct ExperimentConfig {
    std::string id;
    std::string task;
    double horizon = 1.0;
    int steps = 100;
    nlohmann::json driver_spec;   // {"name": ..., "params": {...}}
    nlohmann::json claim_spec;    // {"kind": ..., ...}
    nlohmann::json claim2_spec;   // optional second claim (portfolio F, allocation X)
    nlohmann::json params;        // task-specific parameters
    nlohmann::json asserts;       // [{"quantity":..., "equals"/"leq"/"geq":..., "tol":...}]
    std::uint64_t seed = 0;

    /// "<id>#seed=<seed>" as recorded in every report row.
    std::string row_id() const { return id + "#seed=" + std::to_string(seed); }
};

/// Build a driver from its config spec; known names are the built-ins
/// (zero, scaled_abs_z, linear_y, neg_part_y, example1, example2,
/// example2_staircase, example3, example3_restricted).
Driver driver_from_spec(const nlohmann::json& spec);

/// Claim kinds: identity, constant, call, table; optional "scale" and
/// "shift" applied afterwards.
TerminalClaim claim_from_spec(const nlohmann::json& spec);

ExperimentConfig parse_experiment(const nlohmann::json& j);

/// Load one config file; a top-level {"experiments": [...]} becomes a
/// batch. `task_override` (from the CLI subcommand) and `seed_override` are
/// applied to every experiment when present.
std::vector<ExperimentConfig> load_config_file(const std::string& path,
                                               const std::optional<std::string>& task_override,
                                               const std::optional<std::uint64_t>& seed_override);

} // namespace starbsde
