#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lesionbench {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Machine-readable result of one subcommand run. per_image records carry
/// full-precision values so every aggregate can be recomputed from them;
/// headline scores additionally appear half-up-rounded to 4 decimals
/// under "<name>_rounded", which is the form reports quote.
struct Report {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json per_image = nlohmann::json::array();
  nlohmann::json aggregates = nlohmann::json::object();
  std::vector<std::string> warnings;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }

  nlohmann::json to_json() const;
  std::string to_json_text() const { return to_json().dump(2); }

  /// Per-image records as CSV: columns from the first record's keys.
  std::string to_csv() const;
};

}  // namespace lesionbench
