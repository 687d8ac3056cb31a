#pragma once

#include <stdexcept>
#include <string>

namespace dscrf {

// Bad inputs: files, dimensions, malformed masks/configs. CLI exit code 2.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values, diverged optimization. CLI exit code 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dscrf
