#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dvs {

// Invalid configuration or rejected command input. CLI exit code 2.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed on-disk data. Carries the byte offset of the problem. CLI exit code 3.
class format_error : public std::runtime_error {
 public:
  format_error(const std::string& msg, std::uint64_t byte_offset)
      : std::runtime_error(msg + " (byte offset " + std::to_string(byte_offset) + ")"),
        offset_(byte_offset) {}

  std::uint64_t byte_offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

// Violated internal invariant. CLI exit code 4.
class internal_error : public std::logic_error {
 public:
  explicit internal_error(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace dvs
