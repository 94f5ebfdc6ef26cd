#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "dyad/bump.hpp"
#include "dyad/hsystem.hpp"
#include "dyad/model.hpp"
#include "dyad/partition.hpp"
#include "dyad/state.hpp"

namespace dyad {

/// Piecewise closed-form shell amplitudes built over a geometric partition
/// from a calibrated profile triple.  Shell j of the velocity lives on
/// [t_{j+1}, t_{j-1}]; the magnetic shell glues four branches of the profile
/// ladder rho^{-j} h and ends in an exponential tail.  For the gNSE variant
/// the pair (a, b) stores the half-sum/half-difference pair (u, v).
///
/// Branches are half-open [t_{j+1}, t_j) etc.; evaluation exactly at a knot
/// uses the right branch.  Evaluators accept any j >= 0; j_max is the default
/// reporting depth.
struct ConstructedSolution {
  Model model;
  Partition partition;
  Bump bump;
  HSolution h;
  int j_max = 12;
  double amp_exp = 0.0;  // 2 - theta, or s_exp - 1 for the rescaled variants

  double a(int j, double t) const;
  double a_dot(int j, double t) const;  // analytic branch derivative
  double b(int j, double t) const;
  double b_dot(int j, double t) const;

  /// f_j(t) per the defining combination of the velocity equation.
  double forcing(int j, double t) const;

  ShellState sample(double t, int n_shells) const;

  /// Smooth pieces of b_j intersected with [0, t_end] (knot-aware grids).
  std::vector<std::pair<double, double>> b_branches(int j, double t_end) const;

  /// Sorted breakpoints of f_j within [lo, hi], endpoints included.
  std::vector<double> forcing_breakpoints(int j, double lo, double hi) const;

  double horizon() const { return partition.horizon; }

  // cached powers indexed by j+2 (filled by assemble_solution; evaluation
  // falls back to pow beyond the cached range)
  std::vector<double> knot_cache;
  std::vector<double> tscale_cache;  // lambda^{s_exp j}
  std::vector<double> amp_cache;     // lambda^{amp_exp j}
  std::vector<double> rho_cache;     // rho^{-j}
  std::vector<double> coupling_cache;
  std::vector<double> dissa_cache;

  double knot_at(int j) const;
  double tscale_at(int j) const;
  double amp_at(int j) const;
  double rho_pow(int j) const;
  double coupling_at(int j) const;
  double dissipation_a_at(int j) const;
};

/// Validates model/profile/partition consistency and materializes the
/// per-shell evaluators.  The construction requires nu = mu = 1.
ConstructedSolution assemble_solution(const Model& model,
                                      const Partition& partition,
                                      const Bump& bump, const HSolution& h,
                                      int j_max);

enum class ForcingKind { Zero, Tabulated, Synthesized };

/// Per-shell forcing evaluated on demand.  Synthesized forcing vanishes for
/// t < t_{j+1} by construction.  Tabulated forcing interpolates linearly and
/// is undefined outside its sample range.
class Forcing {
 public:
  Forcing() = default;  // zero

  static Forcing zero();
  static Forcing tabulated(std::vector<double> times,
                           std::vector<std::vector<double>> shell_rows);
  static Forcing synthesized(std::shared_ptr<const ConstructedSolution> sol);

  ForcingKind kind() const { return kind_; }
  const std::shared_ptr<const ConstructedSolution>& solution() const {
    return solution_;
  }

  /// Fills f_0..f_N; throws std::out_of_range where undefined.
  void eval_into(double t, std::span<double> out) const;

 private:
  ForcingKind kind_ = ForcingKind::Zero;
  std::shared_ptr<const ConstructedSolution> solution_;
  std::vector<double> times_;
  std::vector<std::vector<double>> rows_;  // rows_[k][j]
};

Forcing synthesize_forcing(std::shared_ptr<const ConstructedSolution> sol);

}  // namespace dyad
