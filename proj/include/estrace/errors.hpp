#pragma once

#include <stdexcept>
#include <string>

namespace estrace {

/// Invalid configuration: bad fid, inconsistent mu/lambda, unknown variant name.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke a precondition (dimension mismatch, non-finite input).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed data handed to an analysis step (NaN, too short, degenerate labels).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Artifacts expected on disk are absent or were produced by a different config.
class MissingInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// f_best fell below f_opt; indicates a broken objective.
class AccountingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace estrace
