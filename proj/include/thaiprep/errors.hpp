#pragma once

#include <stdexcept>
#include <string>

namespace thaiprep {

/// Bad input data, unreadable files or invalid configuration. The CLI maps
/// this (and std::invalid_argument) to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Write failure. `written` counts the records flushed before the failure.
class WriteError : public std::runtime_error {
 public:
  WriteError(const std::string& what, std::size_t written)
      : std::runtime_error(what + " (" + std::to_string(written) + " records written before failure)"),
        written_(written) {}

  std::size_t written() const { return written_; }

 private:
  std::size_t written_;
};

}  // namespace thaiprep
