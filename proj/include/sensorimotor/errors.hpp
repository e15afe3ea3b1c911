#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sensorimotor {

// Invalid configuration values (dimensions, ranges, unknown keys).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Vector or matrix shapes that do not match the model.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Non-finite input or a numerically broken update.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operation called with arguments outside its domain (empty input etc).
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Query over a range that holds no data.
struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed image data; offset is the byte position where parsing stopped.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace sensorimotor
