#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace carleman {

inline constexpr int kCsvSchema = 1;

// Plot-ready table. The first emitted line is
//   # schema=1 command=<cmd> table=<name> digest=<hex> timestamp=<utc>
// and everything after it depends only on the config and seed.
struct CsvTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  std::string body() const;
  std::string render(const std::string& command, const std::string& digest, const std::string& timestamp) const;
};

// Fixed-format cells so that bodies compare byte for byte.
std::string cell(double v);
std::string cell(int v);
std::string cell(const std::string& v);

// ISO 8601, UTC, second resolution.
std::string utc_timestamp();

// Content after the first line (the body of an emitted CSV file).
std::string strip_header(const std::string& text);

// JSON numbers cannot carry inf/nan; they become null there.
nlohmann::json json_number(double v);

}  // namespace carleman
