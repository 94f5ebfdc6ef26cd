#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dyad/construction.hpp"
#include "dyad/model.hpp"
#include "dyad/state.hpp"

namespace dyad {

/// Integrating-factor RK4 (Lawson): the diagonal dissipation is advanced by
/// its exact exponential each stage; the quadratic coupling and the forcing
/// see classical RK4.  This removes the lambda_N^{2s} step-size ceiling of
/// the linear part.
struct IntegratorConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  enum class Method { Ifrk4 } method = Method::Ifrk4;
  bool richardson_check = false;
  int store_every = 1;  // keep every k-th step in the trajectory
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ShellState> states;
  Forcing forcing_used;
  std::optional<double> richardson_max_diff;

  int n_shells() const { return states.empty() ? -1 : states.front().n_shells(); }
  double sample_dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

/// Integrates the truncated system from `initial` to t_end.  The time step is
/// t_end/n with n = round(t_end/dt), so samples land on uniform multiples.
/// Throws BlowUpError at the first non-finite value.
Trajectory integrate(const Model& model, const ShellState& initial,
                     const Forcing& forcing, const IntegratorConfig& cfg);

/// Discrete energy-budget defect along a trajectory:
///   defect(t) = [E(t) + int_0^t dissipation] - [E(0) + int_0^t work],
/// with both integrals taken at sample resolution (4th-order cumulative rule).
/// scale holds the largest magnitude among the three budget pieces.
struct BudgetSeries {
  std::vector<double> times;
  std::vector<double> defect;
  double scale = 0.0;

  double max_abs_defect() const;
};

BudgetSeries energy_budget(const Model& model, const Trajectory& traj,
                           const Forcing& forcing);

/// Ball radius, Lipschitz-type constant and contraction time of the
/// truncated-system fixed-point map:
///   R_N = 2|a^0| + 2|b^0| + 2 int_0^T |f^N|,
///   t_N1 = 1 / (2 C_N (2 R_N + 1)),
/// with C_N = max(nu la_N^{2s_a}, mu la_N^{2s_b}) + 2*coupling(N).
struct ContractionBounds {
  double radius = 0.0;     // R_N
  double time = 0.0;       // t_{N,1}
  double lipschitz = 0.0;  // C_N
};

ContractionBounds contraction_bounds(const Model& model,
                                     const ShellState& initial,
                                     const Forcing& forcing, double horizon,
                                     int quad_panels = 4096);

/// Truncation-convergence study: integrates each N with the same data
/// extension rule and reports the consecutive-pair sup differences over the
/// common shells and times, plus max|b| per run (trivial-branch oracle).
struct ConvergencePair {
  int n_lo = 0, n_hi = 0;
  double sup_diff = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergencePair> pairs;
  std::vector<double> max_abs_b;  // one entry per N
};

ConvergenceStudy convergence_study(
    const Model& model, const std::function<ShellState(int)>& extend,
    const Forcing& forcing, std::span<const int> shell_counts,
    const IntegratorConfig& cfg);

}  // namespace dyad
