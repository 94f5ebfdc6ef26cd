#pragma once

#include <map>
#include <string>
#include <vector>

#include "dyad/construction.hpp"
#include "dyad/integrator.hpp"

namespace dyad {

/// Residual of the magnetic/difference equation at (j, t), using the analytic
/// branch derivative of b.  Which equation depends on the model variant.
double b_equation_residual(const ConstructedSolution& s, int j, double t);

/// Natural magnitude of the residual terms at shell j:
/// lambda_j^{s_exp} * rho^{-j+1} * max|h|.
double b_residual_scale(const ConstructedSolution& s, int j);

struct ResidualSweep {
  // sup |residual| per shell and branch, and the worst scale-relative value
  std::vector<std::vector<double>> sup_per_branch;  // [j][branch]
  double worst_rel = 0.0;
};

ResidualSweep residual_sweep(const ConstructedSolution& s, int j_hi,
                             int samples_per_branch = 10000);

struct ContinuityGap {
  int shell;
  double knot;
  double gap;
  double tolerance;  // 1e-10 * rho^{-j+1}
};

/// Two-sided branch evaluation at every interior knot of every shell <= j_hi.
std::vector<ContinuityGap> continuity_gaps(const ConstructedSolution& s,
                                           int j_hi);

struct DecayFit {
  double slope_a = 0.0;  // expected: amp_exp * log(lambda)
  double slope_b = 0.0;  // expected: -log(rho)
  int j_lo = 0, j_hi = 0;
  std::vector<double> sup_a, sup_b;  // per shell in [j_lo, j_hi]
};

DecayFit decay_fit(const ConstructedSolution& s, int j_lo, int j_hi,
                   int samples_per_branch = 2000);

struct Summability {
  std::vector<double> partial_sums;  // S_0..S_{j_hi}
  std::vector<double> increments;    // weight_j * int f_j^2
  std::vector<double> ratios;        // increments[j+1] / increments[j]
  double tail_estimate = 0.0;        // geometric extrapolation past j_hi
};

/// Partial sums of sum_j weight_j int_0^T f_j^2 with weight_j the inverse
/// velocity-dissipation multiplier; knot-aware quadrature per shell.
Summability forcing_partial_sums(const ConstructedSolution& s, int j_hi,
                                 int panels_per_segment = 64);

struct EnergyIdentity {
  double defect = 0.0;      // absolute identity defect at time t
  double scale = 0.0;       // sum of magnitudes of the budget pieces
  double tail_bound = 0.0;  // geometric estimate of the beyond-j_max tail
};

/// (energy at t) + (dissipation integral) - (initial energy) - (work
/// integral), summed over shells <= j_max with knot-aware quadrature.
EnergyIdentity check_energy_identity(const ConstructedSolution& s, double t,
                                     int j_max, int panels_per_segment = 64);

struct NonuniquenessReport {
  double separation = 0.0;             // sup_t ||b_constructed||_l2
  double residual_rel = 0.0;           // branch 1: worst b-residual, relative
  double identity_rel = 0.0;           // branch 1: energy identity defect / scale
  double galerkin_budget_rel = 0.0;    // branch 2: budget defect / scale
  double galerkin_max_b = 0.0;         // branch 2: sup |b| (must be exactly 0)
  std::map<std::string, bool> pass;
  bool all_pass() const;
};

struct NonuniquenessParams {
  double rho = 0.0;         // 0 -> lambda^{theta+1} default
  double q_amplitude = 1.0;
  int grid_m = 4096;
  int j_max = 12;
  int galerkin_n = 5;
  double galerkin_dt = 5e-7;
  int store_every = 4;
  int identity_j_max = 20;
};

/// Two distinct solutions under one forcing: the calibrated construction
/// (b != 0) versus the Galerkin branch from zero data, which keeps b == 0.
NonuniquenessReport nonuniqueness_demo(const Model& model,
                                       const NonuniquenessParams& par,
                                       ConstructedSolution* out_solution = nullptr,
                                       Trajectory* out_galerkin = nullptr);

struct WeakStrongResult {
  std::vector<double> times;
  std::vector<double> lhs;       // difference energy + dissipation integral
  std::vector<double> envelope;  // Gronwall majorant
  double max_violation = 0.0;    // max(lhs - envelope), round-off negative ok
  double c1 = 0.0;
};

/// Difference-energy functional between two trajectories on their common
/// shells, with the Gronwall envelope built from the first ("strong") one.
WeakStrongResult weak_strong_distance(const Model& model,
                                      const Trajectory& strong,
                                      const Trajectory& weak, int envelope_j);

struct UniquenessReport {
  double divergence = 0.0;      // sup difference across the two runs
  double c0_min = 0.0;          // smallest C0 with |a_j|,|b_j| <= C0 la_j^{2-th}
  double gronwall_violation = 0.0;
  std::map<std::string, bool> pass;
  bool all_pass() const;
};

struct UniquenessParams {
  double dt_coarse = 1e-3;
  double dt_fine = 5e-4;
  int n_coarse = 12;
  int n_fine = 16;
  double t_end = 1.0;
  int envelope_j = 4;
};

/// Re-solves the profile at twice the grid and reports the largest common
/// sample difference (quadrature self-check).
double profile_refinement_defect(const ConstructedSolution& s);

/// The documented smooth decaying data family used by the uniqueness checks.
ShellState standard_uniqueness_data(const Model& model, int n_shells);

/// Subcritical-regime check: two independent discretizations of the same
/// data must coincide within discretization error when theta <= 2.
UniquenessReport uniqueness_demo(const Model& model, const Forcing& forcing,
                                 const UniquenessParams& par,
                                 Trajectory* out_coarse = nullptr);

}  // namespace dyad
