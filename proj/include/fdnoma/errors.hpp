#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fdnoma {

/// Argument outside a function's mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input that is formally valid but collapses a formula (e.g. coincident poles).
class DegenerateInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent system configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Power allocation violates a_k - gamma_th,k * sum_{t>k} a_t > 0.
class InfeasibleAllocation : public ConfigError {
 public:
  InfeasibleAllocation(const std::string& what, std::size_t user)
      : ConfigError(what), user_(user) {}
  /// 1-based index of the first offending user.
  std::size_t user() const noexcept { return user_; }

 private:
  std::size_t user_;
};

/// Quadrature non-convergence or an out-of-range analytic residue.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fdnoma
