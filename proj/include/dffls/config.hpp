#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>

#include "dffls/engine.hpp"
#include "dffls/scenario.hpp"

namespace dffls {

inline constexpr const char* kVersion = "0.1.0";

// Fully resolved run configuration: the scenario, the metrics parameters
// and the output layout. `resolved` is the canonical JSON form (defaults
// filled in, regressor specs expanded per sensor) written to the manifest,
// so a manifest re-run parses to an identical configuration.
struct RunConfig {
    Scenario scenario;
    int h = 1;
    double p = 2.0;
    int replications = 64;
    bool snapshots = false;
    std::string out_dir = ".";
    bool write_csv = true;
    bool write_json = true;
    std::optional<WeightOrientation> orientation;  // set iff explicitly configured
    nlohmann::json resolved() const;
};

// Parses and validates; throws ConfigInvalid with a field path on errors.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Loads the config embedded in a run manifest, restoring the recorded seed
// and weight orientation.
RunConfig load_manifest(const std::string& path);

// Checks the structural assumptions the stability theory needs: switching
// mode requires every digraph balanced and the chain irreducible and
// aperiodic; column orientation on a fixed graph requires balancedness.
// Throws ConfigInvalid unless `allow_unverified` is set.
void validate_assumptions(const RunConfig& config, bool allow_unverified);

nlohmann::json make_manifest(const RunConfig& config, WeightOrientation orientation);

const char* orientation_name(WeightOrientation o);
WeightOrientation parse_orientation(const std::string& name);

}  // namespace dffls
