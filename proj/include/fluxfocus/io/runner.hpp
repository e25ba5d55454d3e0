#pragma once

#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "fluxfocus/io/config.hpp"

namespace fluxfocus::io {

// sysexits-style status codes
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 64;
inline constexpr int exit_config = 65;
inline constexpr int exit_solver = 70;
inline constexpr int exit_io = 74;

inline constexpr const char* threads_env = "FLUXFOCUS_THREADS";

struct RunReport {
    std::vector<std::string> outputs;  // file names relative to the output directory
    std::string summary;               // one or two human readable lines
};

// Validates the config for the command, runs it and writes all artifacts plus
// manifest.json into config.output.dir.
RunReport run(Command command, const ScenarioConfig& config, int threads);

// command line value, else the environment variable, else 1
int resolve_threads(std::optional<int> requested);
void apply_threads(int threads);

// maps library exceptions to exit codes and a diagnostic line
int exit_code_for(const std::exception& e, std::string& message);

}  // namespace fluxfocus::io
