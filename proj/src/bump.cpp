#include "dyad/bump.hpp"

#include <cmath>

namespace dyad {

double Bump::phi(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double g = s * (1.0 - s);
  return std::exp(4.0 - 1.0 / g);
}

double Bump::phi_prime(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double g = s * (1.0 - s);
  // d/ds [-1/g] = g'/g^2 with g' = 1 - 2s
  return phi(s) * (1.0 - 2.0 * s) / (g * g);
}

}  // namespace dyad
