#pragma once

#include <stdexcept>
#include <string>

namespace qicsim {

/// Invalid scenario, smearing or run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation requested on a momentum-channel (v^(2)) smearing.
class UnsupportedChannelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Command-line or API misuse (empty subsets, zero-size grids, ...).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical result failed an internal consistency check. Carries the
/// achieved error estimate (or offending residual) for diagnostics.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double estimate)
      : std::runtime_error(what + " (estimate " + std::to_string(estimate) + ")"),
        estimate_(estimate) {}

  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

}  // namespace qicsim
