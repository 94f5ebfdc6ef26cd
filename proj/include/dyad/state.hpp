#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace dyad {

/// Truncated shell amplitudes (a_0..a_N, b_0..b_N) at one time instant.
/// Ghost shells a_{-1} = b_{-1} = 0 and a_{N+1} = b_{N+1} = 0 are implied,
/// never stored.  NSE variants carry b identically zero.
struct ShellState {
  double time = 0.0;
  std::vector<double> a;
  std::vector<double> b;

  ShellState() = default;
  ShellState(int n_shells, double t = 0.0)
      : time(t), a(n_shells + 1, 0.0), b(n_shells + 1, 0.0) {}

  int n_shells() const { return static_cast<int>(a.size()) - 1; }

  bool finite() const {
    for (double x : a)
      if (!std::isfinite(x)) return false;
    for (double x : b)
      if (!std::isfinite(x)) return false;
    return std::isfinite(time);
  }

  void validate() const {
    if (a.empty() || a.size() != b.size())
      throw std::invalid_argument("ShellState: a and b must share one length >= 1");
    if (!finite())
      throw std::invalid_argument("ShellState: non-finite entry");
  }
};

}  // namespace dyad
