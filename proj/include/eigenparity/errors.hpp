#pragma once

#include <stdexcept>
#include <string>

namespace eigenparity {

/// Bad or insufficient input data: malformed files, degenerate panels,
/// constant columns, dimension mismatches discovered while ingesting.
class data_error : public std::runtime_error {
 public:
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: SPD violations, non-convergence, invalid parameter
/// ranges for the math layer.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace eigenparity
