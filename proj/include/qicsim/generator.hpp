#pragma once

#include "qicsim/smearing.hpp"

namespace qicsim {

/// One instantaneous detector coupling event, generated by
/// O = \int d^dx v(x) phi(time, x).
struct Generator {
  RadialSmearing smearing;
  double time = 0.0;
  double coupling = 1.0;
  /// Detector energy gap. Carried along but never enters a result.
  double gap = 0.0;
};

}  // namespace qicsim
