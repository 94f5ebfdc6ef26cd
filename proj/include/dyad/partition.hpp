#pragma once

#include <vector>

namespace dyad {

/// Geometric time partition of (0, T] with T = 1/(lambda^{s_exp} - 1) and
/// knots t_j = lambda^{-s_exp j} T, so that t_{j-1} - t_j = lambda^{-s_exp j}.
/// Negative j extends the knot ladder past T (used by the lowest shells).
struct Partition {
  double lambda = 2.0;
  double s_exp = 2.0;  // 2 for theta-form models, 2*alpha / 2*beta otherwise
  int j_max = 12;
  double horizon = 0.0;  // T

  static Partition make(double lambda, double s_exp, int j_max);

  double knot(int j) const;
  /// Knots t_0..t_{j_max}, materialized.
  std::vector<double> knots() const;

 private:
  std::vector<double> cache_;
};

}  // namespace dyad
