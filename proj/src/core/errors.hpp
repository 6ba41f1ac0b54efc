#pragma once

#include <stdexcept>
#include <string>

namespace lrbsl {

// Error taxonomy shared by the C API and the CLI exit codes:
// validation = 1, io = 2, numeric = 3.

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lrbsl
