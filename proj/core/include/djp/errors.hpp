#pragma once

#include <stdexcept>
#include <string>

namespace djp {

// Invalid scenario / invalid construction parameters. CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure (quadrature non-convergence, step-size trouble, envelope
// violation). CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace djp
