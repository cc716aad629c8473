#pragma once

#include <stdexcept>
#include <string>

namespace rightmost {

// Precondition broken by the caller (mismatched levels, bad parity, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Invalid user-supplied configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An occupied site left the tracked window where the semantics forbid it.
class WindowOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical guard tripped: enumeration too large, iteration did not
// converge, conditioning horizon beyond what rejection can sustain.
class NumericalGuard : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Nothing to report, e.g. zero surviving trials or too few fit points.
class NoData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rightmost
