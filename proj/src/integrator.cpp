#include "dyad/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dyad/errors.hpp"
#include "dyad/norms.hpp"
#include "dyad/quadrature.hpp"

namespace dyad {
namespace {

// Precomputed step kernel for one (model, N, dt) combination.
struct StepKernel {
  int n;
  bool use_b;
  CascadeCoeffs c;
  std::vector<double> w;                  // coupling weights
  std::vector<double> e1a, e2a, e1b, e2b; // exact half/full-step decay factors
  double dt;

  StepKernel(const Model& m, int n_shells, double step) : n(n_shells), dt(step) {
    use_b = m.uses_b();
    c = m.cascade();
    w.resize(n + 1);
    e1a.resize(n + 1);
    e2a.resize(n + 1);
    e1b.resize(n + 1);
    e2b.resize(n + 1);
    for (int j = 0; j <= n; ++j) {
      w[j] = m.coupling(j);
      e1a[j] = std::exp(-m.nu * m.dissipation_a(j) * 0.5 * dt);
      e2a[j] = e1a[j] * e1a[j];
      e1b[j] = std::exp(-m.mu * m.dissipation_b(j) * 0.5 * dt);
      e2b[j] = e1b[j] * e1b[j];
    }
  }

  // quadratic coupling + forcing; matches rhs_nonlinear shell by shell
  void remainder(const std::vector<double>& a, const std::vector<double>& b,
                 const std::vector<double>& f, std::vector<double>& da,
                 std::vector<double>& db) const {
    for (int j = 0; j <= n; ++j) {
      const double wj = w[j];
      const double wm = j > 0 ? w[j - 1] : 0.0;
      const double ajp = j < n ? a[j + 1] : 0.0;
      const double ajm = j > 0 ? a[j - 1] : 0.0;
      double da_j = -c.a1 * (wj * a[j] * ajp - wm * ajm * ajm) + f[j];
      if (use_b) {
        const double bjp = j < n ? b[j + 1] : 0.0;
        const double bjm = j > 0 ? b[j - 1] : 0.0;
        da_j -= c.a3 * (wj * b[j] * bjp - wm * bjm * bjm);
        db[j] = -c.a2 * (wj * a[j] * bjp - wm * ajm * bjm) -
                c.a3 * (wj * b[j] * ajp - wm * ajm * bjm);
      } else {
        db[j] = 0.0;
      }
      da[j] = da_j;
    }
  }
};

struct Workspace {
  std::vector<double> f0, f1, f2;           // forcing at t, t+dt/2, t+dt
  std::vector<double> k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
  std::vector<double> ua, ub;

  explicit Workspace(int n) {
    for (auto* v : {&f0, &f1, &f2, &k1a, &k1b, &k2a, &k2b, &k3a, &k3b, &k4a,
                    &k4b, &ua, &ub})
      v->assign(n + 1, 0.0);
  }
};

void check_finite_or_throw(const ShellState& s) {
  for (std::size_t j = 0; j < s.a.size(); ++j) {
    if (!std::isfinite(s.a[j])) throw BlowUpError(s.time, static_cast<int>(j), false);
    if (!std::isfinite(s.b[j])) throw BlowUpError(s.time, static_cast<int>(j), true);
  }
}

Trajectory run_ifrk4(const Model& model, const ShellState& initial,
                     const Forcing& forcing, long long steps, double t_end,
                     int store_every) {
  const int n = initial.n_shells();
  const double span = t_end - initial.time;
  const double dt = span / static_cast<double>(steps);
  const StepKernel kern(model, n, dt);
  Workspace ws(n);

  std::vector<double> a = initial.a, b = initial.b;
  Trajectory traj;
  traj.forcing_used = forcing;
  traj.times.reserve(steps / store_every + 2);
  traj.states.reserve(steps / store_every + 2);

  auto store = [&](long long step) {
    ShellState s;
    s.time = initial.time + step * dt;
    s.a = a;
    s.b = b;
    check_finite_or_throw(s);
    traj.times.push_back(s.time);
    traj.states.push_back(std::move(s));
  };
  store(0);

  forcing.eval_into(initial.time, ws.f0);
  for (long long step = 0; step < steps; ++step) {
    const double t = initial.time + step * dt;
    forcing.eval_into(t + 0.5 * dt, ws.f1);
    forcing.eval_into(t + dt, ws.f2);

    kern.remainder(a, b, ws.f0, ws.k1a, ws.k1b);
    for (int j = 0; j <= n; ++j) {
      ws.ua[j] = kern.e1a[j] * (a[j] + 0.5 * dt * ws.k1a[j]);
      ws.ub[j] = kern.e1b[j] * (b[j] + 0.5 * dt * ws.k1b[j]);
    }
    kern.remainder(ws.ua, ws.ub, ws.f1, ws.k2a, ws.k2b);
    for (int j = 0; j <= n; ++j) {
      ws.ua[j] = kern.e1a[j] * a[j] + 0.5 * dt * ws.k2a[j];
      ws.ub[j] = kern.e1b[j] * b[j] + 0.5 * dt * ws.k2b[j];
    }
    kern.remainder(ws.ua, ws.ub, ws.f1, ws.k3a, ws.k3b);
    for (int j = 0; j <= n; ++j) {
      ws.ua[j] = kern.e2a[j] * a[j] + kern.e1a[j] * dt * ws.k3a[j];
      ws.ub[j] = kern.e2b[j] * b[j] + kern.e1b[j] * dt * ws.k3b[j];
    }
    kern.remainder(ws.ua, ws.ub, ws.f2, ws.k4a, ws.k4b);
    for (int j = 0; j <= n; ++j) {
      a[j] = kern.e2a[j] * a[j] +
             dt / 6.0 * (kern.e2a[j] * ws.k1a[j] +
                         2.0 * kern.e1a[j] * (ws.k2a[j] + ws.k3a[j]) + ws.k4a[j]);
      b[j] = kern.e2b[j] * b[j] +
             dt / 6.0 * (kern.e2b[j] * ws.k1b[j] +
                         2.0 * kern.e1b[j] * (ws.k2b[j] + ws.k3b[j]) + ws.k4b[j]);
    }
    // abort at the first non-finite step, never clip
    for (int j = 0; j <= n; ++j) {
      if (!std::isfinite(a[j])) throw BlowUpError(t + dt, j, false);
      if (!std::isfinite(b[j])) throw BlowUpError(t + dt, j, true);
    }
    std::swap(ws.f0, ws.f2);  // stage reuse: f(t+dt) becomes next f(t)
    if ((step + 1) % store_every == 0 || step + 1 == steps) store(step + 1);
  }
  return traj;
}

}  // namespace

Trajectory integrate(const Model& model, const ShellState& initial,
                     const Forcing& forcing, const IntegratorConfig& cfg) {
  model.validate();
  initial.validate();
  if (!model.uses_b()) {
    for (double x : initial.b)
      if (x != 0.0)
        throw std::invalid_argument("integrate: NSE variant requires b == 0");
  }
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (!(cfg.t_end > initial.time))
    throw std::invalid_argument("integrate: t_end must exceed the initial time");
  if (cfg.store_every < 1)
    throw std::invalid_argument("integrate: store_every must be >= 1");

  // steps rounded up to a store_every multiple so samples stay uniform
  const double span = cfg.t_end - initial.time;
  long long steps = std::max(1ll, std::llround(span / cfg.dt));
  steps = ((steps + cfg.store_every - 1) / cfg.store_every) * cfg.store_every;

  Trajectory traj = run_ifrk4(model, initial, forcing, steps, cfg.t_end,
                              cfg.store_every);
  if (cfg.richardson_check) {
    Trajectory shadow = run_ifrk4(model, initial, forcing, 2 * steps,
                                  cfg.t_end, 2 * cfg.store_every);
    double worst = 0.0;
    const std::size_t m = std::min(traj.states.size(), shadow.states.size());
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t j = 0; j < traj.states[k].a.size(); ++j) {
        worst = std::max(worst, std::abs(traj.states[k].a[j] - shadow.states[k].a[j]));
        worst = std::max(worst, std::abs(traj.states[k].b[j] - shadow.states[k].b[j]));
      }
    }
    traj.richardson_max_diff = worst;
  }
  return traj;
}

double BudgetSeries::max_abs_defect() const {
  double m = 0.0;
  for (double d : defect) m = std::max(m, std::abs(d));
  return m;
}

BudgetSeries energy_budget(const Model& model, const Trajectory& traj,
                           const Forcing& forcing) {
  const std::size_t m = traj.states.size();
  if (m < 2) throw std::invalid_argument("energy_budget: trajectory too short");
  const int n = traj.n_shells();
  const double h = traj.sample_dt();

  std::vector<double> dis(m), wrk(m), en(m), f(n + 1);
  for (std::size_t k = 0; k < m; ++k) {
    const ShellState& s = traj.states[k];
    double d = 0.0;
    for (int j = 0; j <= n; ++j)
      d += model.nu * model.dissipation_a(j) * s.a[j] * s.a[j] +
           model.mu * model.dissipation_b(j) * s.b[j] * s.b[j];
    dis[k] = d;
    forcing.eval_into(s.time, f);
    double wsum = 0.0;
    for (int j = 0; j <= n; ++j) wsum += f[j] * s.a[j];
    wrk[k] = wsum;
    en[k] = energy(s);
  }
  const std::vector<double> cum_dis = cumulative_from_samples(h, dis);
  const std::vector<double> cum_wrk = cumulative_from_samples(h, wrk);

  BudgetSeries out;
  out.times = traj.times;
  out.defect.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    out.defect[k] = (en[k] + cum_dis[k]) - (en[0] + cum_wrk[k]);
    out.scale = std::max({out.scale, en[k], std::abs(cum_dis[k]),
                          std::abs(cum_wrk[k])});
  }
  return out;
}

ContractionBounds contraction_bounds(const Model& model,
                                     const ShellState& initial,
                                     const Forcing& forcing, double horizon,
                                     int quad_panels) {
  model.validate();
  initial.validate();
  if (!(horizon > 0.0))
    throw std::invalid_argument("contraction_bounds: horizon must be positive");
  const int n = initial.n_shells();

  double na = 0.0, nb = 0.0;
  for (int j = 0; j <= n; ++j) {
    na += initial.a[j] * initial.a[j];
    nb += initial.b[j] * initial.b[j];
  }
  double f_l1 = 0.0;
  if (forcing.kind() != ForcingKind::Zero) {
    std::vector<double> f(n + 1);
    f_l1 = integrate_simpson(
        [&](double t) {
          forcing.eval_into(t, f);
          double s = 0.0;
          for (double v : f) s += v * v;
          return std::sqrt(s);
        },
        0.0, horizon, quad_panels);
  }

  ContractionBounds out;
  out.radius = 2.0 * std::sqrt(na) + 2.0 * std::sqrt(nb) + 2.0 * f_l1;
  out.lipschitz = std::max(model.nu * model.dissipation_a(n),
                           model.mu * model.dissipation_b(n)) +
                  2.0 * model.coupling(n);
  out.time = 1.0 / (2.0 * out.lipschitz * (2.0 * out.radius + 1.0));
  return out;
}

ConvergenceStudy convergence_study(
    const Model& model, const std::function<ShellState(int)>& extend,
    const Forcing& forcing, std::span<const int> shell_counts,
    const IntegratorConfig& cfg) {
  if (shell_counts.size() < 2)
    throw std::invalid_argument("convergence_study: need at least two truncations");
  for (std::size_t i = 1; i < shell_counts.size(); ++i)
    if (shell_counts[i] <= shell_counts[i - 1])
      throw std::invalid_argument("convergence_study: truncations must increase");

  std::vector<Trajectory> runs;
  runs.reserve(shell_counts.size());
  ConvergenceStudy study;
  for (int n : shell_counts) {
    runs.push_back(integrate(model, extend(n), forcing, cfg));
    double mb = 0.0;
    for (const ShellState& s : runs.back().states)
      for (double v : s.b) mb = std::max(mb, std::abs(v));
    study.max_abs_b.push_back(mb);
  }
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    const Trajectory& lo = runs[i];
    const Trajectory& hi = runs[i + 1];
    const int common = std::min(lo.n_shells(), hi.n_shells());
    const std::size_t steps = std::min(lo.states.size(), hi.states.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < steps; ++k)
      for (int j = 0; j <= common; ++j) {
        worst = std::max(worst, std::abs(lo.states[k].a[j] - hi.states[k].a[j]));
        worst = std::max(worst, std::abs(lo.states[k].b[j] - hi.states[k].b[j]));
      }
    study.pairs.push_back({shell_counts[i], shell_counts[i + 1], worst});
  }
  return study;
}

}  // namespace dyad
