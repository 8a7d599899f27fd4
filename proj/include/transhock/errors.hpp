#pragma once

#include <stdexcept>
#include <string>

namespace transhock {

// Bad thermodynamic or configuration input (non-positive pressure, M <= 1, ...).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Nozzle geometry became invalid (wall angle past pi/2, shock curve left the duct).
class GeometryError : public std::runtime_error {
 public:
  explicit GeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

// Explicit marching step violates the stability bound.
class CflError : public std::runtime_error {
 public:
  explicit CflError(const std::string& msg) : std::runtime_error(msg) {}
};

// Supersonic march broke down (loss of supersonicity, negative pressure, ...).
class MarchError : public std::runtime_error {
 public:
  explicit MarchError(const std::string& msg) : std::runtime_error(msg) {}
};

// Boundary data of a first-order elliptic problem fail the integral
// solvability condition.  Carries the offending residual; the free-boundary
// logic reads it to steer the shock anchor.
class SolvabilityError : public std::runtime_error {
 public:
  SolvabilityError(const std::string& msg, double residual)
      : std::runtime_error(msg), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class SingularMatrixError : public std::runtime_error {
 public:
  explicit SingularMatrixError(const std::string& msg) : std::runtime_error(msg) {}
};

// Fixed-point iteration diverged or left its trust ball.
class ContractionError : public std::runtime_error {
 public:
  explicit ContractionError(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class InternalError : public std::runtime_error {
 public:
  explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace transhock
