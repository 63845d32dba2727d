#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace fraclab::cli {

inline constexpr const char* library_version = "0.1.0";

struct RunOptions {
    std::optional<std::string> output_dir;
    std::optional<std::string> partition;
    std::optional<std::string> fixtures;
    int jobs = 1;
};

struct RunResult {
    int status = 0;  // 0 ok, 2 convergence demanded but not reached
    std::string output_dir;
    std::vector<std::string> outputs;
    nlohmann::json verdict;
};

// Parses and validates a config; errors carry `source:line:`.
nlohmann::json parse_config(const std::string& text, const std::string& source = "<config>");
nlohmann::json load_config(const std::string& file);

// Throws fraclab::Error on failure.
RunResult run(const nlohmann::json& config, const RunOptions& options);

// Shortest round-trip decimal form.
std::string format_double(double x);
std::string config_hash(const nlohmann::json& config);

int main_entry(int argc, char** argv);

}  // namespace fraclab::cli
