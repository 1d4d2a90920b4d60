#pragma once

#include <stdexcept>
#include <string>

namespace heatobs {

// Invalid or inconsistent configuration (bad sizes, mismatched grids, bad
// config values). The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Probe schedule leaves the domain or is otherwise infeasible.
class ScheduleError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// A caller broke an operation's precondition (negative gain, stale frame...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Gauss-Seidel did not reach tolerance. Carries the last residual (K).
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

}  // namespace heatobs
