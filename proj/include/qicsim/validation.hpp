#pragma once

#include <string>
#include <vector>

#include "qicsim/field_kernel.hpp"

namespace qicsim {

struct CheckResult {
  std::string group;
  std::string name;
  double residual = 0.0;
  double limit = 0.0;
  /// Passing means residual > limit instead of residual <= limit.
  bool lower_bound = false;

  bool passed() const noexcept;
};

struct ValidationOptions {
  QuadratureOptions quadrature;
  unsigned threads = 0;
  /// Restrict to these groups; empty runs everything.
  std::vector<std::string> only;
};

/// Check groups in run order.
const std::vector<std::string>& validation_groups();

/// Runs the invariant suite on the built-in scenarios. Throws UsageError for
/// unknown group names.
std::vector<CheckResult> run_validation(const ValidationOptions& opts);

}  // namespace qicsim
