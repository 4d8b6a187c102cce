#pragma once

#include <stdexcept>
#include <string>

namespace monoproj {

/// Invalid input: malformed grids, bad configuration, unreadable files.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical breakdown: factorization failure, NaN in a chain.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace monoproj
