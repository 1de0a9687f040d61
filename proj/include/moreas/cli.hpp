#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace moreas {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

/// Level from MOREAS_LOG (error|info|debug); defaults to error.
LogLevel log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);
void log_warn(const std::string& msg);  // always shown
void log_error(const std::string& msg);

struct SimulateOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;  // overrides the config seed
    std::string out_dir;
};

struct EstimateOptions {
    std::string in_dir;
    std::string out_dir;
    bool use_logit = false;
};

struct ReportOptions {
    std::string in_dir;
    std::string out_dir;
    bool svg = false;
};

int run_simulate(const SimulateOptions& opts);
int run_estimate(const EstimateOptions& opts);
int run_report(const ReportOptions& opts);

/// FNV-1a 64 over the concatenated bytes of the named files.
std::string hash_inputs(const std::vector<std::string>& paths);

}  // namespace moreas
