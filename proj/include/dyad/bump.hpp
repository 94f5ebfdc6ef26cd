#pragma once

namespace dyad {

/// Smooth compactly supported profile on (0,1):
///   phi(s) = exp(4 - 1/(s(1-s))),  phi(1/2) = 1,  phi == 0 outside (0,1).
/// The construction profiles are p = P*phi and q = Q*phi.
struct Bump {
  double p_amplitude = 0.0;
  double q_amplitude = 0.0;

  static double phi(double s);
  static double phi_prime(double s);

  double p(double s) const { return p_amplitude * phi(s); }
  double q(double s) const { return q_amplitude * phi(s); }
  double p_prime(double s) const { return p_amplitude * phi_prime(s); }
  double q_prime(double s) const { return q_amplitude * phi_prime(s); }
};

}  // namespace dyad
