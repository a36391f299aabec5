#pragma once

#include <string>
#include <vector>

namespace wisheig {

/// What a truncated series evaluation did. Every density and CDF returns one
/// next to its value.
struct Diagnostics {
  int degree_used = 0;
  double tail_estimate = 0.0;  // in the units of the returned value
  double clamp_amount = 0.0;   // |raw - returned| when the raw value left its range
  bool converged = false;      // tail criterion met before the maximum degree
  std::vector<std::string> warnings;
};

struct Evaluation {
  double value = 0.0;
  Diagnostics diagnostics;
};

}  // namespace wisheig
