#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace contactea {

/// Raised when an operation is requested for a contact model that does not support it.
class UnsupportedKind : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a field operation meets NaN or Inf in its input.
class NonFiniteValue : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical blowup during time integration.
class BlowupError : public std::runtime_error {
 public:
  BlowupError(const std::string& what, double t, double m_linf, double bkm_integral)
      : std::runtime_error(what), t_(t), m_linf_(m_linf), bkm_integral_(bkm_integral) {}

  double t() const noexcept { return t_; }
  double m_linf() const noexcept { return m_linf_; }
  double bkm_integral() const noexcept { return bkm_integral_; }

 private:
  double t_;
  double m_linf_;
  double bkm_integral_;
};

/// Raised when the timestep violates the CFL bound and the stepper is configured to refuse.
class CflViolation : public std::runtime_error {
 public:
  CflViolation(const std::string& what, double courant)
      : std::runtime_error(what), courant_(courant) {}
  double courant() const noexcept { return courant_; }

 private:
  double courant_;
};

/// Scenario configuration error. `line()` is 0 when the error is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace contactea
