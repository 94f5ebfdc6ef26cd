#include "dyad/construction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dyad {
namespace {

HVariant expected_h_variant(Variant v) {
  switch (v) {
    case Variant::MhdForward: return HVariant::TriangularForward;
    case Variant::MhdMixed: return HVariant::TriangularMixed;
    case Variant::MhdFractional: return HVariant::TriangularFractional;
    case Variant::NseFractional: return HVariant::CoupledGnse;
    default:
      throw std::invalid_argument(
          "assemble_solution: no construction for model variant");
  }
}

}  // namespace

ConstructedSolution assemble_solution(const Model& model,
                                      const Partition& partition,
                                      const Bump& bump, const HSolution& h,
                                      int j_max) {
  model.validate();
  if (h.eval == nullptr)
    throw std::invalid_argument("assemble_solution: profile not solved");
  if (h.variant != expected_h_variant(model.variant))
    throw std::invalid_argument(
        "assemble_solution: profile variant does not match the model");
  if (model.nu != 1.0 || (model.uses_b() && model.mu != 1.0))
    throw std::invalid_argument("assemble_solution: construction requires nu = mu = 1");
  if (!std::isfinite(h.rho) || h.rho == 0.0)
    throw std::invalid_argument(
        "assemble_solution: profile carries no growth factor rho");
  if (model.lambda != partition.lambda || model.lambda != h.params.lambda)
    throw std::invalid_argument("assemble_solution: lambda mismatch");

  double want_s = 2.0;
  double exponent = model.theta;
  if (model.variant == Variant::NseFractional) {
    want_s = 2.0 * model.alpha;
    exponent = model.alpha;
  } else if (model.variant == Variant::MhdFractional) {
    want_s = 2.0 * model.beta;
    exponent = model.beta;
  }
  if (std::abs(partition.s_exp - want_s) > 1e-14 * want_s)
    throw std::invalid_argument("assemble_solution: partition s_exp mismatch");
  if (std::abs(h.params.exponent - exponent) > 1e-14 * exponent)
    throw std::invalid_argument("assemble_solution: profile exponent mismatch");

  ConstructedSolution s;
  s.model = model;
  s.partition = partition;
  s.bump = bump;
  s.h = h;
  s.j_max = j_max;
  s.amp_exp = model.fractional() ? partition.s_exp - 1.0 : 2.0 - model.theta;
  const int j_hi = std::max(j_max + 2, 66);
  s.knot_cache.resize(j_hi + 3);
  s.tscale_cache.resize(j_hi + 3);
  s.amp_cache.resize(j_hi + 3);
  s.rho_cache.resize(j_hi + 3);
  s.coupling_cache.resize(j_hi + 3);
  s.dissa_cache.resize(j_hi + 3);
  for (int j = -2; j <= j_hi; ++j) {
    s.knot_cache[j + 2] = partition.knot(j);
    s.tscale_cache[j + 2] = std::pow(partition.lambda, partition.s_exp * j);
    s.amp_cache[j + 2] = std::pow(partition.lambda, s.amp_exp * j);
    s.rho_cache[j + 2] = std::pow(h.rho, -j);
    s.coupling_cache[j + 2] = model.coupling(j);
    s.dissa_cache[j + 2] = model.dissipation_a(j);
  }
  return s;
}

double ConstructedSolution::knot_at(int j) const {
  const int k = j + 2;
  if (k >= 0 && k < static_cast<int>(knot_cache.size())) return knot_cache[k];
  return partition.knot(j);
}

double ConstructedSolution::tscale_at(int j) const {
  const int k = j + 2;
  if (k >= 0 && k < static_cast<int>(tscale_cache.size())) return tscale_cache[k];
  return std::pow(partition.lambda, partition.s_exp * j);
}

double ConstructedSolution::amp_at(int j) const {
  const int k = j + 2;
  if (k >= 0 && k < static_cast<int>(amp_cache.size())) return amp_cache[k];
  return std::pow(partition.lambda, amp_exp * j);
}

double ConstructedSolution::rho_pow(int j) const {
  const int k = j + 2;
  if (k >= 0 && k < static_cast<int>(rho_cache.size())) return rho_cache[k];
  return std::pow(h.rho, -j);
}

double ConstructedSolution::coupling_at(int j) const {
  const int k = j + 2;
  if (k >= 0 && k < static_cast<int>(coupling_cache.size()))
    return coupling_cache[k];
  return model.coupling(j);
}

double ConstructedSolution::dissipation_a_at(int j) const {
  const int k = j + 2;
  if (k >= 0 && k < static_cast<int>(dissa_cache.size())) return dissa_cache[k];
  return model.dissipation_a(j);
}

double ConstructedSolution::a(int j, double t) const {
  if (t < knot_at(j + 1)) return 0.0;
  if (t < knot_at(j)) {
    const double sig = tscale_at(j + 1) * (t - knot_at(j + 1));
    return amp_at(j + 1) * bump.p(sig);
  }
  if (t < knot_at(j - 1)) {
    const double sig = tscale_at(j) * (t - knot_at(j));
    return -amp_at(j) * bump.q(sig);
  }
  return 0.0;
}

double ConstructedSolution::a_dot(int j, double t) const {
  if (t < knot_at(j + 1)) return 0.0;
  if (t < knot_at(j)) {
    const double sig = tscale_at(j + 1) * (t - knot_at(j + 1));
    return amp_at(j + 1) * tscale_at(j + 1) * bump.p_prime(sig);
  }
  if (t < knot_at(j - 1)) {
    const double sig = tscale_at(j) * (t - knot_at(j));
    return -amp_at(j) * tscale_at(j) * bump.q_prime(sig);
  }
  return 0.0;
}

double ConstructedSolution::b(int j, double t) const {
  if (t < knot_at(j + 1)) return 0.0;
  if (t < knot_at(j)) {
    const double sig = tscale_at(j + 1) * (t - knot_at(j + 1));
    return rho_pow(j + 1) * h.eval_h1(sig);
  }
  if (t < knot_at(j - 1)) {
    const double sig = tscale_at(j) * (t - knot_at(j));
    return rho_pow(j) * h.eval_h2(sig);
  }
  if (t < knot_at(j - 2)) {
    const double sig = tscale_at(j - 1) * (t - knot_at(j - 1));
    return rho_pow(j - 1) * h.eval_h3(sig);
  }
  return rho_pow(j - 1) * h.eval_h3(1.0) *
         std::exp(-tscale_at(j) * (t - knot_at(j - 2)));
}

double ConstructedSolution::b_dot(int j, double t) const {
  if (t < knot_at(j + 1)) return 0.0;
  if (t < knot_at(j)) {
    const double scale = tscale_at(j + 1);
    const double sig = scale * (t - knot_at(j + 1));
    return rho_pow(j + 1) * scale * h.eval_d1(sig);
  }
  if (t < knot_at(j - 1)) {
    const double scale = tscale_at(j);
    const double sig = scale * (t - knot_at(j));
    return rho_pow(j) * scale * h.eval_d2(sig);
  }
  if (t < knot_at(j - 2)) {
    const double scale = tscale_at(j - 1);
    const double sig = scale * (t - knot_at(j - 1));
    return rho_pow(j - 1) * scale * h.eval_d3(sig);
  }
  return -tscale_at(j) * b(j, t);
}

double ConstructedSolution::forcing(int j, double t) const {
  const double aj = a(j, t), ajp = a(j + 1, t);
  const double bj = b(j, t), bjp = b(j + 1, t);
  const double ajm = j > 0 ? a(j - 1, t) : 0.0;
  const double bjm = j > 0 ? b(j - 1, t) : 0.0;
  const double wj = coupling_at(j);
  const double wm = j > 0 ? coupling_at(j - 1) : 0.0;
  const CascadeCoeffs c = model.cascade();
  return a_dot(j, t) + model.nu * dissipation_a_at(j) * aj +
         c.a1 * (wj * aj * ajp - wm * ajm * ajm) +
         c.a3 * (wj * bj * bjp - wm * bjm * bjm);
}

ShellState ConstructedSolution::sample(double t, int n_shells) const {
  ShellState s(n_shells, t);
  for (int j = 0; j <= n_shells; ++j) {
    s.a[j] = a(j, t);
    s.b[j] = b(j, t);
  }
  return s;
}

std::vector<std::pair<double, double>> ConstructedSolution::b_branches(
    int j, double t_end) const {
  std::vector<std::pair<double, double>> out;
  const double pts[] = {partition.knot(j + 1), partition.knot(j),
                        partition.knot(j - 1), partition.knot(j - 2), t_end};
  double lo = std::max(0.0, pts[0]);
  for (int k = 1; k < 5; ++k) {
    const double hi = std::min(pts[k], t_end);
    if (hi > lo) out.emplace_back(lo, hi);
    lo = std::max(lo, hi);
    if (lo >= t_end) break;
  }
  return out;
}

std::vector<double> ConstructedSolution::forcing_breakpoints(int j, double lo,
                                                             double hi) const {
  std::vector<double> pts = {lo, hi};
  for (int k = j - 3; k <= j + 2; ++k) {
    const double t = partition.knot(k);
    if (t > lo && t < hi) pts.push_back(t);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

Forcing Forcing::zero() { return Forcing{}; }

Forcing Forcing::tabulated(std::vector<double> times,
                           std::vector<std::vector<double>> shell_rows) {
  if (times.size() < 2 || times.size() != shell_rows.size())
    throw std::invalid_argument("Forcing::tabulated: need matching times/rows");
  if (!std::is_sorted(times.begin(), times.end()))
    throw std::invalid_argument("Forcing::tabulated: times must increase");
  Forcing f;
  f.kind_ = ForcingKind::Tabulated;
  f.times_ = std::move(times);
  f.rows_ = std::move(shell_rows);
  return f;
}

Forcing Forcing::synthesized(std::shared_ptr<const ConstructedSolution> sol) {
  if (!sol) throw std::invalid_argument("Forcing::synthesized: null solution");
  Forcing f;
  f.kind_ = ForcingKind::Synthesized;
  f.solution_ = std::move(sol);
  return f;
}

void Forcing::eval_into(double t, std::span<double> out) const {
  switch (kind_) {
    case ForcingKind::Zero:
      std::fill(out.begin(), out.end(), 0.0);
      return;
    case ForcingKind::Synthesized:
      if (t < 0.0)
        throw std::out_of_range("forcing undefined at t = " + std::to_string(t));
      for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = solution_->forcing(static_cast<int>(j), t);
      return;
    case ForcingKind::Tabulated: {
      if (t < times_.front() || t > times_.back())
        throw std::out_of_range("forcing undefined at t = " + std::to_string(t));
      auto it = std::upper_bound(times_.begin(), times_.end(), t);
      std::size_t k = it == times_.begin()
                          ? 0
                          : static_cast<std::size_t>(it - times_.begin()) - 1;
      if (k + 1 >= times_.size()) k = times_.size() - 2;
      const double u = (t - times_[k]) / (times_[k + 1] - times_[k]);
      const auto& r0 = rows_[k];
      const auto& r1 = rows_[k + 1];
      for (std::size_t j = 0; j < out.size(); ++j) {
        const double v0 = j < r0.size() ? r0[j] : 0.0;
        const double v1 = j < r1.size() ? r1[j] : 0.0;
        out[j] = v0 + u * (v1 - v0);
      }
      return;
    }
  }
}

Forcing synthesize_forcing(std::shared_ptr<const ConstructedSolution> sol) {
  return Forcing::synthesized(std::move(sol));
}

}  // namespace dyad
