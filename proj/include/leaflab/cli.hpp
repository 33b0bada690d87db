#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "leaflab/io.hpp"

namespace leaflab {

inline constexpr const char* kReportSchema = "leaflab.report.v1";
inline constexpr const char* kToolVersion = "0.1.0";

/// Everything a run depends on. Command-specific settings live in params;
/// the report echoes them with defaults filled in.
struct ExperimentConfig {
    std::string command;
    /// Chart kind for "chart": koenigs, bottcher, fatou or affine.
    std::string variant;
    /// Map name ("quad:-1") or coefficient object; null when unused.
    Json map;
    std::uint64_t seed = 1;
    int workers = 1;
    std::optional<int> depth;
    std::optional<double> tol;
    /// Output directory for the report copy and artifacts; empty for none.
    std::string out;
    /// scenery-frames only: emit the flow sequence instead of the level sequence.
    bool animate = false;
    Json params = Json::object();

    bool operator==(const ExperimentConfig&) const = default;
};

Json config_to_json(const ExperimentConfig& c);
/// ConfigError on unknown fields or wrong types.
ExperimentConfig config_from_json(const Json& j);

const std::vector<std::string>& command_names();

struct RunOutcome {
    int exit_code = 0;
    Json report;
};

/// Execute one command. Exit code 0 on success, 2 for configuration
/// errors, 3 for numerical failures; the report carries the error then.
RunOutcome run(const ExperimentConfig& config);

/// Command-line front end: parses flags, runs, prints the report.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace leaflab
