#pragma once

#include <cmath>
#include <string>

namespace dyad {

enum class Variant {
  GeneralMhd,     // (a1,a2,a3) free, lambda_j^theta coupling
  MhdForward,     // preset (1,-1,1): forward energy cascade
  MhdMixed,       // preset (1,1,-1): forward and backward cascade
  NseClassic,     // velocity only, lambda_j^theta coupling
  NseFractional,  // velocity only, lambda_j coupling, lambda_j^{2a} dissipation
  MhdFractional,  // forward-cascade signs, lambda_j coupling, split exponents
};

struct CascadeCoeffs {
  double a1 = 1.0;
  double a2 = -1.0;
  double a3 = 1.0;
};

/// Which dyadic system is being run, with all of its exponents.
///
/// Theta-form variants couple shells with weight lambda_j^theta and dissipate
/// with lambda_j^2.  Fractional variants couple with lambda_j and dissipate
/// with lambda_j^{2 alpha} (velocity) and lambda_j^{2 beta} (magnetic).
struct Model {
  Variant variant = Variant::MhdForward;
  double lambda = 2.0;  // shell ratio, > 1
  double theta = 2.0;   // nonlinearity exponent (theta-form variants)
  double alpha = 0.5;   // velocity dissipation exponent (fractional variants)
  double beta = 0.5;    // magnetic dissipation exponent (MhdFractional)
  double nu = 1.0;      // viscosity
  double mu = 1.0;      // resistivity
  CascadeCoeffs coeffs; // used by GeneralMhd; presets override

  static Model general_mhd(double lambda, double theta, CascadeCoeffs c,
                           double nu = 1.0, double mu = 1.0);
  static Model mhd_forward(double lambda, double theta, double nu = 1.0,
                           double mu = 1.0);
  static Model mhd_mixed(double lambda, double theta, double nu = 1.0,
                         double mu = 1.0);
  static Model nse_classic(double lambda, double theta, double nu = 1.0);
  static Model nse_fractional(double lambda, double alpha, double nu = 1.0);
  static Model mhd_fractional(double lambda, double alpha, double beta,
                              double nu = 1.0, double mu = 1.0);

  bool uses_b() const {
    return variant != Variant::NseClassic && variant != Variant::NseFractional;
  }
  bool fractional() const {
    return variant == Variant::NseFractional ||
           variant == Variant::MhdFractional;
  }

  double lambda_j(int j) const { return std::pow(lambda, j); }

  /// Coefficient of the quadratic shell coupling at shell j (zero for j < 0).
  double coupling(int j) const {
    if (j < 0) return 0.0;
    return fractional() ? lambda_j(j) : std::pow(lambda_j(j), theta);
  }
  double dissipation_a(int j) const {
    return fractional() ? std::pow(lambda_j(j), 2.0 * alpha)
                        : lambda_j(j) * lambda_j(j);
  }
  double dissipation_b(int j) const {
    if (variant == Variant::MhdFractional)
      return std::pow(lambda_j(j), 2.0 * beta);
    return dissipation_a(j);
  }

  /// Resolved cascade signs; presets are fixed by construction.
  CascadeCoeffs cascade() const {
    switch (variant) {
      case Variant::GeneralMhd: return coeffs;
      case Variant::MhdMixed: return {1.0, 1.0, -1.0};
      default: return {1.0, -1.0, 1.0};  // forward cascade
    }
  }

  /// Throws std::invalid_argument when the parameter set is inconsistent.
  void validate() const;

  std::string variant_name() const;
};

Variant variant_from_name(const std::string& name);

}  // namespace dyad
