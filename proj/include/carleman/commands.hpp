#pragma once

#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "carleman/config.hpp"
#include "carleman/report.hpp"

namespace carleman {

struct CommandOptions {
  int jobs = 1;  // worker threads for sweep points and twin solves
};

// Result of one command. Tables are merged in sorted sweep order regardless of jobs.
struct AuditReport {
  std::string command;
  std::string digest;
  std::vector<CsvTable> tables;
  nlohmann::json results = nlohmann::json::object();
  nlohmann::json pass = nlohmann::json::object();
  std::vector<std::string> messages;  // printed to stderr by the CLI
  int exit_code = 0;
  double wall_clock = 0.0;
};

const std::vector<std::string>& command_names();

// Raises ConfigError for an unknown command name; other errors propagate.
AuditReport run_command(const std::string& name, const RunConfig& config, const CommandOptions& options = {});

// Writes <dir>/<table>.csv for every table and <dir>/<command>.json; returns the paths.
std::vector<std::filesystem::path> emit_report(const AuditReport& report, const RunConfig& config,
                                               const std::filesystem::path& dir);

// 2 configuration, 4 assumption failure, 3 any other error.
int exit_code_for(const std::exception& e);

}  // namespace carleman
