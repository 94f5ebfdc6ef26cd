#pragma once

#include <stdexcept>
#include <string>

namespace dyad {

/// Integration aborted at the first non-finite value.
struct BlowUpError : std::runtime_error {
  double time;
  int shell;
  bool magnetic;  // true if the offending component is b_j
  BlowUpError(double t, int j, bool in_b)
      : std::runtime_error("non-finite value at t=" + std::to_string(t) +
                           ", shell " + std::to_string(j) +
                           (in_b ? " (b)" : " (a)")),
        time(t), shell(j), magnetic(in_b) {}
};

/// Calibration cannot reach h1(1) = rho*c0 in the chosen bump family.
struct DegenerateKernelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested growth factor lies in the range excluded by the construction.
struct InvalidRhoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No amplitude pair in the search box produced a usable growth factor.
struct SearchExhaustedError : std::runtime_error {
  double best_rho;  // largest |real eigenvalue| seen over the box
  explicit SearchExhaustedError(double best)
      : std::runtime_error("amplitude search exhausted; best |rho| = " +
                           std::to_string(best)),
        best_rho(best) {}
};

}  // namespace dyad
