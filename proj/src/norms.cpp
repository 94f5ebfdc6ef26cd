#include "dyad/norms.hpp"

#include <cmath>

namespace dyad {

double energy(const ShellState& s) {
  double acc = 0.0;
  for (std::size_t j = 0; j < s.a.size(); ++j)
    acc += s.a[j] * s.a[j] + s.b[j] * s.b[j];
  return 0.5 * acc;
}

double cross_helicity(const ShellState& s) {
  double acc = 0.0;
  for (std::size_t j = 0; j < s.a.size(); ++j) acc += s.a[j] * s.b[j];
  return acc;
}

std::pair<double, double> sobolev_norm(const ShellState& s, double lambda,
                                       double order) {
  double na = 0.0, nb = 0.0;
  for (std::size_t j = 0; j < s.a.size(); ++j) {
    const double w = std::pow(lambda, 2.0 * order * static_cast<double>(j));
    na += w * s.a[j] * s.a[j];
    nb += w * s.b[j] * s.b[j];
  }
  return {std::sqrt(na), std::sqrt(nb)};
}

NormReport make_norm_report(const ShellState& s, double lambda,
                            std::span<const double> sobolev_orders) {
  NormReport r;
  auto l2 = sobolev_norm(s, lambda, 0.0);
  r.l2_a = l2.first;
  r.l2_b = l2.second;
  for (double order : sobolev_orders)
    r.sobolev[order] = sobolev_norm(s, lambda, order);
  r.energy = energy(s);
  r.cross_helicity = cross_helicity(s);
  return r;
}

}  // namespace dyad
