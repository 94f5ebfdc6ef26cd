#include "dyad/partition.hpp"

#include <cmath>
#include <stdexcept>

namespace dyad {

namespace {
// knots are materialized for j in [kLow, kHigh]; outside falls back to pow
constexpr int kLow = -4;
constexpr int kHigh = 96;
}  // namespace

Partition Partition::make(double lambda, double s_exp, int j_max) {
  if (!(lambda > 1.0))
    throw std::invalid_argument("Partition: lambda must exceed 1");
  if (!(s_exp > 0.0))
    throw std::invalid_argument("Partition: s_exp must be positive");
  if (j_max < 2) throw std::invalid_argument("Partition: j_max must be >= 2");
  Partition p;
  p.lambda = lambda;
  p.s_exp = s_exp;
  p.j_max = j_max;
  p.horizon = 1.0 / (std::pow(lambda, s_exp) - 1.0);
  // anchor deep below and climb by t_{j-1} = t_j + lambda^{-s j}, so the
  // difference identity holds at working precision for every cached knot
  p.cache_.resize(kHigh - kLow + 1);
  p.cache_[kHigh - kLow] = std::pow(lambda, -s_exp * kHigh) * p.horizon;
  for (int j = kHigh; j > kLow; --j)
    p.cache_[j - 1 - kLow] =
        p.cache_[j - kLow] + std::pow(lambda, -s_exp * j);
  return p;
}

double Partition::knot(int j) const {
  if (j >= kLow && j <= kHigh && !cache_.empty()) return cache_[j - kLow];
  return std::pow(lambda, -s_exp * j) * horizon;
}

std::vector<double> Partition::knots() const {
  std::vector<double> t(j_max + 1);
  for (int j = 0; j <= j_max; ++j) t[j] = knot(j);
  return t;
}

}  // namespace dyad
