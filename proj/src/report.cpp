#include "carleman/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

#include "carleman/errors.hpp"

namespace carleman {

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != columns.size())
    throw NumericalError("csv table '" + name + "': row has " + std::to_string(row.size()) + " cells, expected " +
                         std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

std::string CsvTable::body() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + row[c];
    out += '\n';
  }
  return out;
}

std::string CsvTable::render(const std::string& command, const std::string& digest, const std::string& timestamp) const {
  return "# schema=" + std::to_string(kCsvSchema) + " command=" + command + " table=" + name + " digest=" + digest +
         " timestamp=" + timestamp + "\n" + body();
}

std::string cell(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

std::string cell(int v) { return std::to_string(v); }

std::string cell(const std::string& v) { return v; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string strip_header(const std::string& text) {
  const auto nl = text.find('\n');
  return nl == std::string::npos ? std::string() : text.substr(nl + 1);
}

nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace carleman
