#pragma once

#include <stdexcept>
#include <string>

namespace fsir {

// Bad arguments, shape mismatches, malformed configs or inputs.
struct invalid_input : std::invalid_argument {
  explicit invalid_input(const std::string& msg) : std::invalid_argument(msg) {}
};

// File-system and parse failures on external files.
struct io_error : std::runtime_error {
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures: empty retained spectrum, indefinite kernels,
// singular linear systems, out-of-range spectra.
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fsir
