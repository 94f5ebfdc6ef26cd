#include "dyad/rhs.hpp"

#include <cmath>
#include <stdexcept>

namespace dyad {
namespace {

struct Weights {
  std::vector<double> w;       // coupling weight at shells 0..N
  std::vector<double> diss_a;  // nu * dissipation multiplier
  std::vector<double> diss_b;  // mu * dissipation multiplier
  CascadeCoeffs c;
};

Weights build_weights(const Model& m, int n) {
  Weights k;
  k.w.resize(n + 1);
  k.diss_a.resize(n + 1);
  k.diss_b.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    k.w[j] = m.coupling(j);
    k.diss_a[j] = m.nu * m.dissipation_a(j);
    k.diss_b[j] = m.mu * m.dissipation_b(j);
  }
  k.c = m.cascade();
  return k;
}

inline double at(const std::vector<double>& v, int j) {
  // ghost convention: indices outside 0..N read as zero
  return (j < 0 || j >= static_cast<int>(v.size())) ? 0.0 : v[j];
}

void check_inputs(const Model& model, const ShellState& state,
                  std::span<const double> f) {
  state.validate();
  if (f.size() != state.a.size())
    throw std::invalid_argument("rhs: forcing_values length mismatch");
  for (double x : f)
    if (!std::isfinite(x))
      throw std::invalid_argument("rhs: non-finite forcing value");
  if (!model.uses_b()) {
    for (double x : state.b)
      if (x != 0.0)
        throw std::invalid_argument("rhs: NSE variant requires b == 0");
  }
}

}  // namespace

void rhs_nonlinear(const Model& model, const ShellState& state,
                   std::span<double> da, std::span<double> db) {
  const int n = state.n_shells();
  if (da.size() != state.a.size() || db.size() != state.b.size())
    throw std::invalid_argument("rhs_nonlinear: output length mismatch");
  const Weights k = build_weights(model, n);
  const auto& a = state.a;
  const auto& b = state.b;
  for (int j = 0; j <= n; ++j) {
    const double wj = k.w[j];
    const double wm = j > 0 ? k.w[j - 1] : 0.0;
    const double ajp = at(a, j + 1), ajm = at(a, j - 1);
    const double bjp = at(b, j + 1), bjm = at(b, j - 1);
    double da_j = -k.c.a1 * (wj * a[j] * ajp - wm * ajm * ajm);
    double db_j = 0.0;
    if (model.uses_b()) {
      da_j -= k.c.a3 * (wj * b[j] * bjp - wm * bjm * bjm);
      db_j = -k.c.a2 * (wj * a[j] * bjp - wm * ajm * bjm) -
             k.c.a3 * (wj * b[j] * ajp - wm * ajm * bjm);
    }
    da[j] = da_j;
    db[j] = db_j;
  }
}

void rhs(const Model& model, const ShellState& state,
         std::span<const double> forcing_values, std::span<double> da,
         std::span<double> db) {
  check_inputs(model, state, forcing_values);
  if (da.size() != state.a.size() || db.size() != state.b.size())
    throw std::invalid_argument("rhs: output length mismatch");
  rhs_nonlinear(model, state, da, db);
  const int n = state.n_shells();
  const Weights k = build_weights(model, n);
  for (int j = 0; j <= n; ++j) {
    da[j] += -k.diss_a[j] * state.a[j] + forcing_values[j];
    if (model.uses_b()) db[j] -= k.diss_b[j] * state.b[j];
  }
}

std::vector<double> rhs(const Model& model, const ShellState& state,
                        std::span<const double> forcing_values) {
  std::vector<double> out(2 * state.a.size());
  std::span<double> da(out.data(), state.a.size());
  std::span<double> db(out.data() + state.a.size(), state.b.size());
  rhs(model, state, forcing_values, da, db);
  return out;
}

double nonlinear_energy_flux(const Model& model, const ShellState& state,
                             double* term_scale) {
  state.validate();
  std::vector<double> da(state.a.size()), db(state.b.size());
  rhs_nonlinear(model, state, da, db);
  double flux = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < state.a.size(); ++j) {
    flux += state.a[j] * da[j] + state.b[j] * db[j];
    scale += std::abs(state.a[j] * da[j]) + std::abs(state.b[j] * db[j]);
  }
  if (term_scale) *term_scale = scale;
  return flux;
}

double nonlinear_cross_helicity_flux(const Model& model,
                                     const ShellState& state,
                                     double* term_scale) {
  state.validate();
  std::vector<double> da(state.a.size()), db(state.b.size());
  rhs_nonlinear(model, state, da, db);
  double flux = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < state.a.size(); ++j) {
    flux += state.a[j] * db[j] + state.b[j] * da[j];
    scale += std::abs(state.a[j] * db[j]) + std::abs(state.b[j] * da[j]);
  }
  if (term_scale) *term_scale = scale;
  return flux;
}

}  // namespace dyad
