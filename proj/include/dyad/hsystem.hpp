#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "dyad/bump.hpp"

namespace dyad {

enum class HVariant {
  TriangularForward,     // forward-cascade MHD, theta-form
  TriangularMixed,       // mixed-cascade MHD, theta-form
  CoupledGnse,           // generalized NSE half-sum/difference system
  TriangularFractional,  // fractional MHD
};

/// Derived coefficients of the auxiliary system on [0,1]:
///   h1' + (eps + s1 w q) h1 + s2 w p h2 = 0
///   h2' + h2 + s3 q h3 = 0
///   h3' + big_d h3 = 0
/// (triangular variants; the coupled variant uses the full matrix instead).
struct HParams {
  HVariant variant;
  double lambda;
  double exponent;  // theta, alpha or beta depending on variant
  double s_exp;     // 2 or 2*alpha or 2*beta
  double w;         // lambda^{-theta} or lambda^{-1}
  double eps;       // lambda^{-s_exp}
  double big_d;     // lambda^{s_exp}
  double s1, s2, s3;

  static HParams make(HVariant v, double lambda, double exponent);
};

class HEvaluator;

/// Profile triple (h1,h2,h3) on [0,1] with its boundary data.  Samples live
/// on a uniform grid of grid_m panels; the evaluator reproduces the profile
/// (and its derivative) anywhere in [0,1] at composite-quadrature accuracy.
struct HSolution {
  HVariant variant = HVariant::TriangularForward;
  int grid_m = 0;
  std::vector<double> h1, h2, h3;
  double c0 = 0.0, d0 = 0.0, rho = 0.0;
  Bump bump;
  HParams params{};
  std::shared_ptr<const HEvaluator> eval;

  double eval_h1(double s) const;
  double eval_h2(double s) const;
  double eval_h3(double s) const;
  double eval_d1(double s) const;
  double eval_d2(double s) const;
  double eval_d3(double s) const;

  /// max(|h1(1) - rho c0|, |h2(1) - rho d0|)
  double boundary_defect() const;
  /// max over samples of max(|h1|, |h2|, |h3|)
  double max_abs() const;
};

/// Integrates the triangular system by exact integrating factors with
/// cumulative composite-Simpson quadrature of the coupling terms.
/// rho is recorded but not validated here.
HSolution solve_h_triangular(HVariant variant, double lambda, double exponent,
                             const Bump& bump, double c0, double d0,
                             int grid_m, double rho = 0.0);

struct TriangularCalibration {
  double c0;
  double d0;
  double p_amplitude;
  HSolution h;
};

/// Normalizes d0 = 1, computes c0 from the h2(1) = rho d0 constraint and
/// solves the p-amplitude in closed form from h1(1) = rho c0 (h2 does not
/// depend on p and h1 is linear in it).  Throws InvalidRhoError when rho_target
/// lies in the excluded range and DegenerateKernelError when the kernel
/// integral vanishes (or a pinned p-amplitude cannot meet the boundary value).
TriangularCalibration calibrate_triangular(
    HVariant variant, double lambda, double exponent, double q_amplitude,
    double rho_target, int grid_m,
    std::optional<double> fixed_p_amplitude = std::nullopt);

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Boundary matrix B of the coupled system: column k holds components (1,2)
/// of the time-1 value of the basis solution started from e_{k+2}.
Mat2 gnse_boundary_matrix(double lambda, double alpha, const Bump& bump,
                          int grid_m);

/// Real eigenvalue of largest modulus, when the spectrum is real.
std::optional<double> leading_real_eigenvalue(const Mat2& b);

struct SearchBox {
  double p_min = -50.0, p_max = 50.0;
  double q_min = -50.0, q_max = 50.0;
  int n_coarse = 101;  // per axis
};

/// Integrates the coupled system from (0, c0, d0); rho is recorded only.
HSolution solve_h_coupled(double lambda, double alpha, const Bump& bump,
                          double c0, double d0, int grid_m, double rho = 0.0);

struct GnseCalibration {
  Bump bump;  // found amplitudes
  double c0, d0, rho;
  HSolution h;
  Mat2 boundary;
  double eigen_residual;  // |B v - rho v| for v = (c0, d0)
};

/// Scans (P,Q) over the box in expanding rings around the origin until the
/// boundary matrix has a real eigenvalue with |rho| > r_target, then refines
/// locally.  Deterministic first-success ordering; parallel over grid cells.
/// Throws SearchExhaustedError (carrying the best |rho| seen) on failure.
GnseCalibration calibrate_monodromy_gnse(double lambda, double alpha,
                                         double r_target,
                                         const SearchBox& box = {},
                                         int grid_m = 2048, int workers = 0);

}  // namespace dyad
