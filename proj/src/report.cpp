#include "lesionbench/report.hpp"

#include <algorithm>
#include <sstream>

#include "lesionbench/metrics.hpp"

namespace lesionbench {

nlohmann::json Report::to_json() const {
  nlohmann::json doc;
  doc["tool_version"] = std::string(kToolVersion);
  doc["command"] = command;
  doc["config"] = config;
  doc["per_image"] = per_image;
  doc["aggregates"] = aggregates;
  doc["warnings"] = warnings;
  doc["errors"] = errors;
  return doc;
}

std::string Report::to_csv() const {
  std::ostringstream out;
  if (per_image.empty()) return "";

  // Union of keys across records; fields a record lacks print empty.
  std::vector<std::string> columns;
  for (const auto& record : per_image) {
    for (auto it = record.begin(); it != record.end(); ++it) {
      if (std::find(columns.begin(), columns.end(), it.key()) ==
          columns.end()) {
        columns.push_back(it.key());
      }
    }
  }
  std::sort(columns.begin(), columns.end());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out << (i ? "," : "") << columns[i];
  }
  out << "\n";

  for (const auto& record : per_image) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out << ",";
      if (!record.contains(columns[i])) continue;
      const auto& value = record.at(columns[i]);
      if (value.is_number_float()) {
        out << format_fixed(value.get<double>(), 4);
      } else if (value.is_string()) {
        out << value.get<std::string>();
      } else {
        out << value.dump();
      }
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace lesionbench
