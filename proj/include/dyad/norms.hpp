#pragma once

#include <map>
#include <span>
#include <utility>

#include "dyad/model.hpp"
#include "dyad/state.hpp"

namespace dyad {

/// E = (1/2) sum_j (a_j^2 + b_j^2).
double energy(const ShellState& s);

/// H^c = sum_j a_j b_j.
double cross_helicity(const ShellState& s);

/// (||a||_s, ||b||_s) with ||u||_s^2 = sum_j lambda_j^{2s} u_j^2.
std::pair<double, double> sobolev_norm(const ShellState& s, double lambda,
                                       double order);

struct NormReport {
  double l2_a = 0.0;
  double l2_b = 0.0;
  std::map<double, std::pair<double, double>> sobolev;
  double energy = 0.0;
  double cross_helicity = 0.0;
};

NormReport make_norm_report(const ShellState& s, double lambda,
                            std::span<const double> sobolev_orders);

}  // namespace dyad
