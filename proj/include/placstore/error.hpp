#pragma once

// Error taxonomy shared by all modules. The CLI maps each class to a stable
// exit code (see cli.hpp).

#include <cstdint>
#include <stdexcept>
#include <string>

namespace placstore {

// Bad parameter or malformed value (exit code 2).
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& msg) : std::invalid_argument(msg) {}
};

// Operation not permitted in the current object state, e.g. appending to a
// frozen datastore (exit code 2).
class StateError : public std::logic_error {
 public:
  explicit StateError(const std::string& msg) : std::logic_error(msg) {}
};

// Malformed or truncated file. Carries the byte offset at which the problem
// was detected (exit code 3).
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& msg, std::uint64_t byte_offset)
      : std::runtime_error(msg + " (byte offset " + std::to_string(byte_offset) + ")"),
        offset_(byte_offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

// Not enough data for the requested computation, e.g. margins on a store
// with fewer than two entries (exit code 4).
class InsufficientData : public std::runtime_error {
 public:
  explicit InsufficientData(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace placstore
