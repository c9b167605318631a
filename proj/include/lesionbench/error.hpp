#pragma once

#include <stdexcept>
#include <string>

namespace lesionbench {

// Error taxonomy mirrored one-to-one by the C API status codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Shape or size disagreement between masks/images.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Filesystem and PNG codec failures.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed CSV/JSON content.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Invalid run configuration or argument values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A score that is mathematically undefined for the given inputs,
// e.g. a per-class attribute score with zero non-empty ground truths.
class UndefinedScoreError : public Error {
 public:
  using Error::Error;
};

}  // namespace lesionbench
