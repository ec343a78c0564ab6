#pragma once

#include <stdexcept>
#include <string>

namespace hbct {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad inputs: out-of-range parameters, malformed config, unknown keys.
/// Mapped to exit code 1 by the CLI.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Runtime numerical failures: root bracketing blow-ups, dead hops,
/// scenarios with no feasible allocation. Mapped to exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A checked invariant did not hold (selftest, sweep dominance check).
/// Mapped to exit code 3.
class PropertyViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace hbct
