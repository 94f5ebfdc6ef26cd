#include "dyad/model.hpp"

#include <stdexcept>

namespace dyad {

Model Model::general_mhd(double lambda, double theta, CascadeCoeffs c,
                         double nu, double mu) {
  Model m;
  m.variant = Variant::GeneralMhd;
  m.lambda = lambda;
  m.theta = theta;
  m.nu = nu;
  m.mu = mu;
  m.coeffs = c;
  m.validate();
  return m;
}

Model Model::mhd_forward(double lambda, double theta, double nu, double mu) {
  Model m;
  m.variant = Variant::MhdForward;
  m.lambda = lambda;
  m.theta = theta;
  m.nu = nu;
  m.mu = mu;
  m.coeffs = {1.0, -1.0, 1.0};
  m.validate();
  return m;
}

Model Model::mhd_mixed(double lambda, double theta, double nu, double mu) {
  Model m;
  m.variant = Variant::MhdMixed;
  m.lambda = lambda;
  m.theta = theta;
  m.nu = nu;
  m.mu = mu;
  m.coeffs = {1.0, 1.0, -1.0};
  m.validate();
  return m;
}

Model Model::nse_classic(double lambda, double theta, double nu) {
  Model m;
  m.variant = Variant::NseClassic;
  m.lambda = lambda;
  m.theta = theta;
  m.nu = nu;
  m.mu = 0.0;
  m.validate();
  return m;
}

Model Model::nse_fractional(double lambda, double alpha, double nu) {
  Model m;
  m.variant = Variant::NseFractional;
  m.lambda = lambda;
  m.alpha = alpha;
  m.nu = nu;
  m.mu = 0.0;
  m.validate();
  return m;
}

Model Model::mhd_fractional(double lambda, double alpha, double beta,
                            double nu, double mu) {
  Model m;
  m.variant = Variant::MhdFractional;
  m.lambda = lambda;
  m.alpha = alpha;
  m.beta = beta;
  m.nu = nu;
  m.mu = mu;
  m.validate();
  return m;
}

void Model::validate() const {
  if (!(lambda > 1.0))
    throw std::invalid_argument("Model: lambda must exceed 1");
  if (nu < 0.0 || mu < 0.0)
    throw std::invalid_argument("Model: nu and mu must be nonnegative");
  if (fractional()) {
    if (!(alpha > 0.0))
      throw std::invalid_argument("Model: alpha must be positive");
    if (variant == Variant::MhdFractional && !(beta > 0.0))
      throw std::invalid_argument("Model: beta must be positive");
  } else {
    if (!(theta > 0.0))
      throw std::invalid_argument("Model: theta must be positive");
  }
}

std::string Model::variant_name() const {
  switch (variant) {
    case Variant::GeneralMhd: return "general_mhd";
    case Variant::MhdForward: return "mhd_forward";
    case Variant::MhdMixed: return "mhd_mixed";
    case Variant::NseClassic: return "nse_classic";
    case Variant::NseFractional: return "nse_fractional";
    case Variant::MhdFractional: return "mhd_fractional";
  }
  return "unknown";
}

Variant variant_from_name(const std::string& name) {
  if (name == "general_mhd") return Variant::GeneralMhd;
  if (name == "mhd_forward") return Variant::MhdForward;
  if (name == "mhd_mixed") return Variant::MhdMixed;
  if (name == "nse_classic") return Variant::NseClassic;
  if (name == "nse_fractional") return Variant::NseFractional;
  if (name == "mhd_fractional") return Variant::MhdFractional;
  throw std::invalid_argument("unknown model variant: " + name);
}

}  // namespace dyad
