// config.hpp — Scenario configuration: JSON schema 1, validation, echo

#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "lambda_dyn/reservoir.hpp"
#include "lambda_dyn/system.hpp"

namespace lambda_dyn {

struct GridSpec {
    enum class Kind { Default, Geometric, Linear, Explicit };
    Kind kind = Kind::Default;
    double t_min = 0.0;
    double t_max = 0.0;
    int points = 400;
    std::vector<double> times;  // Explicit only

    std::vector<double> resolve(const SystemParams& p) const;
};

// Named preset ("level1", "level2", "level3", "mixed", "gibbs0", "dark") or explicit matrix.
struct InitialStateSpec {
    std::string preset = "level1";
    std::optional<Matrix3cd> matrix;

    DensityMatrix resolve(const SystemParams& p) const;
};

struct ReservoirTables {
    double omega_min = 0.0;
    double omega_max = 10.0;  // in units of κ0
    int omega_points = 201;
    double t_min = 0.0;
    double t_max = 10.0;      // in units of 1/κ0
    int t_points = 201;
};

struct RunSettings {
    GridSpec grid;
    InitialStateSpec initial_state;
    ReservoirTables tables;
    std::string out = "out";
    std::string format = "csv";
    unsigned threads = 0;  // 0: hardware concurrency
};

struct ScenarioConfig {
    SystemParams system;
    FormFactor reservoir;
    RunSettings run;
    std::vector<std::string> warnings;  // produced while loading, not echoed
};

// β = 1, Δ = 1, λ = 0.05, σ = 1e-5, A = 0.3, p = -1/2, m = 1, κ0 = 1, W = 4π.
ScenarioConfig standard_config();

// Throws ConfigError carrying "source:line:column: field: reason".
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>");
ScenarioConfig load_config(const std::string& path);

nlohmann::json config_to_json(const ScenarioConfig& c);

// Same physics and run settings; used for the echo round trip.
bool equivalent(const ScenarioConfig& a, const ScenarioConfig& b);

} // namespace lambda_dyn
