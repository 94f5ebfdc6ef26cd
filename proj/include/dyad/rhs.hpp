#pragma once

#include <span>
#include <vector>

#include "dyad/model.hpp"
#include "dyad/state.hpp"

namespace dyad {

/// Instantaneous derivative of every shell amplitude for the selected system.
/// forcing_values must hold f_0..f_N.  da and db must hold N+1 slots each.
/// NSE variants require b == 0 and leave db == 0.
void rhs(const Model& model, const ShellState& state,
         std::span<const double> forcing_values, std::span<double> da,
         std::span<double> db);

/// Convenience form returning (da_0..da_N, db_0..db_N).
std::vector<double> rhs(const Model& model, const ShellState& state,
                        std::span<const double> forcing_values);

/// Only the quadratic coupling groups (no dissipation, no forcing).
void rhs_nonlinear(const Model& model, const ShellState& state,
                   std::span<double> da, std::span<double> db);

/// sum_j [a_j * (nonlinear a-terms) + b_j * (nonlinear b-terms)]:
/// the total nonlinear contribution to dE/dt.  Telescopes to zero for the
/// cascade presets on a truncated state.  term_scale, when given, receives
/// the sum of absolute values of the individual products.
double nonlinear_energy_flux(const Model& model, const ShellState& state,
                             double* term_scale = nullptr);

/// sum_j [a_j * (nonlinear b-terms) + b_j * (nonlinear a-terms)]: nonlinear
/// contribution to dH^c/dt.  Zero for MhdMixed, generally nonzero for
/// MhdForward.
double nonlinear_cross_helicity_flux(const Model& model,
                                     const ShellState& state,
                                     double* term_scale = nullptr);

}  // namespace dyad
