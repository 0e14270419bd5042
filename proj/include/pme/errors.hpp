#pragma once

#include <stdexcept>
#include <string>

namespace pme {

// Bad inputs or contract violations (maps to CLI exit code 2).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown: degenerate problems, non-finite intermediates (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pme
