#pragma once

#include <functional>
#include <vector>

namespace dyad {

using Fn = std::function<double(double)>;

/// Composite Simpson over [a, b] with the given number of panels
/// (each panel evaluates the midpoint, so 2*panels+1 points total).
double integrate_simpson(const Fn& g, double a, double b, int panels);

/// Composite 5-point Gauss-Legendre; used as the independent oracle rule.
double integrate_gauss5(const Fn& g, double a, double b, int panels);

/// Cumulative integral of a smooth integrand over [0, upper], tabulated on a
/// uniform grid of m panels.  Evaluation anywhere in [0, upper] adds a single
/// Simpson correction on the partial panel, so off-grid queries keep the
/// composite accuracy.
class CumulativeIntegral {
 public:
  CumulativeIntegral() = default;
  CumulativeIntegral(Fn g, double upper, int m);

  double operator()(double t) const;
  double total() const { return table_.back(); }
  int panels() const { return m_; }

 private:
  Fn g_;
  double upper_ = 1.0;
  double h_ = 0.0;
  int m_ = 0;
  std::vector<double> table_;
};

/// Cumulative integral of uniformly sampled data (spacing h) using the
/// 4th-order cubic rule; the first/last intervals use one-sided cubics.
/// Falls back to trapezoid when fewer than four samples are given.
std::vector<double> cumulative_from_samples(double h,
                                            const std::vector<double>& values);

}  // namespace dyad
