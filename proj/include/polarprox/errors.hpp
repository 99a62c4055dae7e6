#pragma once

#include <stdexcept>
#include <string>

namespace polarprox {

/// Iterative oracle failed to stabilize within its budget.
class NonConvergenceError : public std::runtime_error {
 public:
  explicit NonConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Sublevel-set projection certified (heuristically) that the level set is empty.
class InfeasibleLevelError : public std::runtime_error {
 public:
  explicit InfeasibleLevelError(const std::string& what) : std::runtime_error(what) {}
};

/// Radius bisection could not bracket a sign change.
class BisectionFailureError : public std::runtime_error {
 public:
  explicit BisectionFailureError(const std::string& what) : std::runtime_error(what) {}
};

/// A perspective gauge was queried at height zero without a recession oracle.
class MissingRecessionError : public std::runtime_error {
 public:
  explicit MissingRecessionError(const std::string& what) : std::runtime_error(what) {}
};

/// A point handed to an auditor as a fixed point failed re-verification.
class InvalidFixedPointError : public std::runtime_error {
 public:
  explicit InvalidFixedPointError(const std::string& what) : std::runtime_error(what) {}
};

/// Facial verification requested without a known minimum on the function spec.
class MissingGroundTruthError : public std::runtime_error {
 public:
  explicit MissingGroundTruthError(const std::string& what) : std::runtime_error(what) {}
};

/// Scenario configuration failed validation; message carries the offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polarprox
