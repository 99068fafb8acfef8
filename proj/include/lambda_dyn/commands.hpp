// commands.hpp — Batch commands behind the command-line front end

#pragma once

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lambda_dyn/config.hpp"
#include "lambda_dyn/io.hpp"

namespace lambda_dyn {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitConfig = 2, kExitNumeric = 3 };

// Warnings go to the report and, as they arrive, to the error stream.
class RunReport {
public:
    RunReport(std::string command, std::ostream& err) : command_(std::move(command)), err_(err) {}

    void warn(const std::string& message);
    void add_file(const std::filesystem::path& path, std::size_t rows);
    void add_timing(const std::string& stage, double seconds);
    void set_config(const ScenarioConfig& config);
    void set_field(const std::string& key, nlohmann::json value);

    const std::vector<std::string>& warnings() const { return warnings_; }
    nlohmann::json to_json() const;

private:
    std::string command_;
    std::ostream& err_;
    nlohmann::json config_;
    nlohmann::json extra_ = nlohmann::json::object();
    nlohmann::json timings_ = nlohmann::json::object();
    std::vector<std::string> warnings_;
    std::vector<std::pair<std::string, std::size_t>> files_;
};

struct CommandOptions {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::pair<int, int>> term;  // (sector j, index s)
};

// Effective worker count: the configured value (0 = hardware) capped by LAMBDA_DYN_THREADS.
unsigned worker_count(unsigned configured);

// Writes <stem>.csv or <stem>.json into dir and records it in the report.
void write_table(const std::filesystem::path& dir, const std::string& stem, const io::Table& table,
                 const std::string& format, RunReport& report);

void cmd_resonances(const ScenarioConfig& config, RunReport& report);
void cmd_evolve(const ScenarioConfig& config, const std::optional<std::pair<int, int>>& term,
                RunReport& report);
void cmd_reservoir(const ScenarioConfig& config, RunReport& report);
// Returns true iff no criterion failed.
bool cmd_validate(const ScenarioConfig& config, RunReport& report, std::ostream& out);

// Loads the config, dispatches, writes report.json and maps failures to exit codes.
int run_command(const std::string& command, const CommandOptions& options, std::ostream& out,
                std::ostream& err);

// "j,s" with j ∈ {-1, 0, 1} and s within the sector; throws ConfigError.
std::pair<int, int> parse_term(const std::string& text);

} // namespace lambda_dyn
