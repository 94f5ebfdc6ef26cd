#include "dyad/hsystem.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <thread>

#include "dyad/errors.hpp"
#include "dyad/quadrature.hpp"

namespace dyad {

HParams HParams::make(HVariant v, double lambda, double exponent) {
  if (!(lambda > 1.0)) throw std::invalid_argument("HParams: lambda must exceed 1");
  if (!(exponent > 0.0)) throw std::invalid_argument("HParams: exponent must be positive");
  HParams p{};
  p.variant = v;
  p.lambda = lambda;
  p.exponent = exponent;
  switch (v) {
    case HVariant::TriangularForward:
      p.s_exp = 2.0;
      p.w = std::pow(lambda, -exponent);
      p.s1 = -1.0; p.s2 = -1.0; p.s3 = 1.0;
      break;
    case HVariant::TriangularMixed:
      p.s_exp = 2.0;
      p.w = std::pow(lambda, -exponent);
      p.s1 = 1.0; p.s2 = 1.0; p.s3 = -1.0;
      break;
    case HVariant::TriangularFractional:
      p.s_exp = 2.0 * exponent;
      p.w = 1.0 / lambda;
      p.s1 = -1.0; p.s2 = -1.0; p.s3 = 1.0;
      break;
    case HVariant::CoupledGnse:
      p.s_exp = 2.0 * exponent;
      p.w = 1.0 / lambda;
      p.s1 = 0.0; p.s2 = 0.0; p.s3 = 0.0;
      break;
  }
  p.eps = std::pow(lambda, -p.s_exp);
  p.big_d = std::pow(lambda, p.s_exp);
  return p;
}

class HEvaluator {
 public:
  virtual ~HEvaluator() = default;
  virtual double h1(double s) const = 0;
  virtual double h2(double s) const = 0;
  virtual double h3(double s) const = 0;
  virtual double d1(double s) const = 0;
  virtual double d2(double s) const = 0;
  virtual double d3(double s) const = 0;
};

double HSolution::eval_h1(double s) const { return eval->h1(s); }
double HSolution::eval_h2(double s) const { return eval->h2(s); }
double HSolution::eval_h3(double s) const { return eval->h3(s); }
double HSolution::eval_d1(double s) const { return eval->d1(s); }
double HSolution::eval_d2(double s) const { return eval->d2(s); }
double HSolution::eval_d3(double s) const { return eval->d3(s); }

double HSolution::boundary_defect() const {
  const double g1 = std::abs(eval->h1(1.0) - rho * c0);
  const double g2 = std::abs(eval->h2(1.0) - rho * d0);
  return std::max(g1, g2);
}

double HSolution::max_abs() const {
  double m = 0.0;
  for (double v : h1) m = std::max(m, std::abs(v));
  for (double v : h2) m = std::max(m, std::abs(v));
  for (double v : h3) m = std::max(m, std::abs(v));
  return m;
}

namespace {

// ---------------------------------------------------------------------------
// Triangular variants: exact integrating factors, quadrature of the couplings.
// ---------------------------------------------------------------------------

class TriangularEvaluator : public HEvaluator {
 public:
  TriangularEvaluator(const HParams& par, const Bump& bump, double c0,
                      double d0, int m)
      : par_(par), bump_(bump), c0_(c0), d0_(d0) {
    const double decay = par_.big_d;
    g_int_ = CumulativeIntegral(
        [decay](double s) { return std::exp((1.0 - decay) * s) * Bump::phi(s); },
        1.0, m);
    w_int_ = CumulativeIntegral([](double s) { return Bump::phi(s); }, 1.0, m);
    u_int_ = CumulativeIntegral(
        [this](double s) {
          return kernel_weight(s) * Bump::phi(s) * h2(s);
        },
        1.0, m);
  }

  TriangularEvaluator(const TriangularEvaluator&) = delete;
  TriangularEvaluator& operator=(const TriangularEvaluator&) = delete;

  double h3(double s) const override { return d0_ * std::exp(-par_.big_d * s); }

  double h2(double s) const override {
    return std::exp(-s) * (c0_ - par_.s3 * d0_ * bump_.q_amplitude * g_int_(s));
  }

  double h1(double s) const override {
    return -par_.s2 * par_.w * bump_.p_amplitude * u_int_(s) / kernel_weight(s);
  }

  double d3(double s) const override { return -par_.big_d * h3(s); }

  double d2(double s) const override {
    return -h2(s) - par_.s3 * bump_.q(s) * h3(s);
  }

  double d1(double s) const override {
    return -(par_.eps + par_.s1 * par_.w * bump_.q(s)) * h1(s) -
           par_.s2 * par_.w * bump_.p(s) * h2(s);
  }

  // e^{eps s + s1 w Q W(s)}: integrating-factor weight of the h1 equation
  double kernel_weight(double s) const {
    return std::exp(par_.eps * s +
                    par_.s1 * par_.w * bump_.q_amplitude * w_int_(s));
  }

  double w_total() const { return w_int_.total(); }
  double g_total() const { return g_int_.total(); }
  const CumulativeIntegral& w_int() const { return w_int_; }

 private:
  HParams par_;
  Bump bump_;
  double c0_, d0_;
  CumulativeIntegral g_int_;  // int_0^s e^{(1-D)r} phi(r) dr
  CumulativeIntegral w_int_;  // int_0^s phi(r) dr
  CumulativeIntegral u_int_;  // int_0^s kernel_weight(r) phi(r) h2(r) dr
};

HSolution sample_solution(HVariant variant, const HParams& par,
                          const Bump& bump, double c0, double d0, double rho,
                          int grid_m, std::shared_ptr<const HEvaluator> ev) {
  HSolution s;
  s.variant = variant;
  s.grid_m = grid_m;
  s.c0 = c0;
  s.d0 = d0;
  s.rho = rho;
  s.bump = bump;
  s.params = par;
  s.eval = std::move(ev);
  s.h1.resize(grid_m + 1);
  s.h2.resize(grid_m + 1);
  s.h3.resize(grid_m + 1);
  for (int i = 0; i <= grid_m; ++i) {
    const double t = static_cast<double>(i) / grid_m;
    s.h1[i] = s.eval->h1(t);
    s.h2[i] = s.eval->h2(t);
    s.h3[i] = s.eval->h3(t);
  }
  return s;
}

void require_triangular(HVariant v) {
  if (v == HVariant::CoupledGnse)
    throw std::invalid_argument("triangular solve called with the coupled variant");
}

void require_rho_admissible(HVariant v, double lambda, double exponent,
                            double rho) {
  const double floor_value =
      (v == HVariant::TriangularFractional) ? lambda : std::pow(lambda, exponent);
  if (!(rho > floor_value))
    throw InvalidRhoError("rho must exceed " + std::to_string(floor_value) +
                          "; got " + std::to_string(rho));
}

}  // namespace

HSolution solve_h_triangular(HVariant variant, double lambda, double exponent,
                             const Bump& bump, double c0, double d0,
                             int grid_m, double rho) {
  require_triangular(variant);
  if (grid_m < 8) throw std::invalid_argument("solve_h_triangular: grid_m too small");
  const HParams par = HParams::make(variant, lambda, exponent);
  auto ev = std::make_shared<TriangularEvaluator>(par, bump, c0, d0, grid_m);
  return sample_solution(variant, par, bump, c0, d0, rho, grid_m, ev);
}

TriangularCalibration calibrate_triangular(HVariant variant, double lambda,
                                           double exponent, double q_amplitude,
                                           double rho_target, int grid_m,
                                           std::optional<double> fixed_p) {
  require_triangular(variant);
  require_rho_admissible(variant, lambda, exponent, rho_target);
  const HParams par = HParams::make(variant, lambda, exponent);
  const double d0 = 1.0;

  // h2(1) = rho d0 fixes c0:  c0 = e rho d0 + s3 d0 Q int_0^1 e^{(1-D)s} phi ds
  const double decay = par.big_d;
  const double g_total = CumulativeIntegral(
      [decay](double s) { return std::exp((1.0 - decay) * s) * Bump::phi(s); },
      1.0, grid_m).total();
  const double c0 = std::exp(1.0) * rho_target * d0 + par.s3 * d0 * q_amplitude * g_total;

  const double scale = (1.0 + std::abs(rho_target)) * (std::abs(c0) + std::abs(d0));

  if (fixed_p) {
    Bump bump{*fixed_p, q_amplitude};
    HSolution h = solve_h_triangular(variant, lambda, exponent, bump, c0, d0,
                                     grid_m, rho_target);
    if (h.boundary_defect() > 1e-10 * scale)
      throw DegenerateKernelError(
          "pinned p-amplitude cannot meet h1(1) = rho c0 (defect " +
          std::to_string(h.boundary_defect()) + ")");
    return {c0, d0, *fixed_p, std::move(h)};
  }

  // h1(1) = rho c0 is linear in the p-amplitude.
  Bump probe{0.0, q_amplitude};
  TriangularEvaluator ev(par, probe, c0, d0, grid_m);
  const double kw1 = ev.kernel_weight(1.0);
  const double denom_integral = integrate_simpson(
      [&ev, kw1](double s) {
        return ev.kernel_weight(s) / kw1 * Bump::phi(s) * ev.h2(s);
      },
      0.0, 1.0, grid_m);
  const double denom = -par.s2 * par.w * denom_integral;
  if (!(std::abs(denom) > 1e-13 * par.w * (std::abs(c0) + std::abs(d0))))
    throw DegenerateKernelError("kernel integral vanished; no p-amplitude solves the boundary condition");
  const double p_amplitude = rho_target * c0 / denom;

  Bump bump{p_amplitude, q_amplitude};
  HSolution h = solve_h_triangular(variant, lambda, exponent, bump, c0, d0,
                                   grid_m, rho_target);
  return {c0, d0, p_amplitude, std::move(h)};
}

// ---------------------------------------------------------------------------
// Coupled gNSE variant: matrix propagation and monodromy eigen-calibration.
// ---------------------------------------------------------------------------

namespace {

using Vec3 = std::array<double, 3>;

// Off-diagonal part of the coefficient matrix applied to y.
inline Vec3 coupled_remainder(const HParams& par, const Bump& bump, double t,
                              const Vec3& y) {
  const double p = bump.p(t), q = bump.q(t);
  const double wl = par.w;  // 1/lambda
  return {wl * q * y[0] - wl * p * y[1],
          2.0 * wl * p * y[0] + q * y[2],
          -2.0 * q * y[1]};
}

inline Vec3 coupled_full(const HParams& par, const Bump& bump, double t,
                         const Vec3& y) {
  Vec3 r = coupled_remainder(par, bump, t, y);
  r[0] -= par.eps * y[0];
  r[1] -= y[1];
  r[2] -= par.big_d * y[2];
  return r;
}

// Lawson (integrating factor) RK4 with the constant diagonal treated exactly.
template <typename Store>
Vec3 propagate_coupled(const HParams& par, const Bump& bump, Vec3 y, int steps,
                       Store&& store) {
  const double h = 1.0 / steps;
  const Vec3 diag = {-par.eps, -1.0, -par.big_d};
  Vec3 e1, e2;
  for (int i = 0; i < 3; ++i) {
    e1[i] = std::exp(diag[i] * h * 0.5);
    e2[i] = e1[i] * e1[i];
  }
  store(0, y);
  for (int n = 0; n < steps; ++n) {
    const double t = n * h;
    const Vec3 k1 = coupled_remainder(par, bump, t, y);
    Vec3 u2, u3, u4;
    for (int i = 0; i < 3; ++i) u2[i] = e1[i] * (y[i] + 0.5 * h * k1[i]);
    const Vec3 k2 = coupled_remainder(par, bump, t + 0.5 * h, u2);
    for (int i = 0; i < 3; ++i) u3[i] = e1[i] * y[i] + 0.5 * h * k2[i];
    const Vec3 k3 = coupled_remainder(par, bump, t + 0.5 * h, u3);
    for (int i = 0; i < 3; ++i) u4[i] = e2[i] * y[i] + e1[i] * h * k3[i];
    const Vec3 k4 = coupled_remainder(par, bump, t + h, u4);
    for (int i = 0; i < 3; ++i)
      y[i] = e2[i] * y[i] +
             h / 6.0 * (e2[i] * k1[i] + 2.0 * e1[i] * (k2[i] + k3[i]) + k4[i]);
    store(n + 1, y);
  }
  return y;
}

class CoupledEvaluator : public HEvaluator {
 public:
  CoupledEvaluator(const HParams& par, const Bump& bump, double c0, double d0,
                   int m)
      : par_(par), bump_(bump), m_(m), h_(1.0 / m) {
    y_.resize(m + 1);
    propagate_coupled(par_, bump_, Vec3{0.0, c0, d0}, m,
                      [this](int i, const Vec3& y) { y_[i] = y; });
    dy_.resize(m + 1);
    for (int i = 0; i <= m; ++i)
      dy_[i] = coupled_full(par_, bump_, i * h_, y_[i]);
  }

  double h1(double s) const override { return value(s)[0]; }
  double h2(double s) const override { return value(s)[1]; }
  double h3(double s) const override { return value(s)[2]; }
  double d1(double s) const override { return deriv(s)[0]; }
  double d2(double s) const override { return deriv(s)[1]; }
  double d3(double s) const override { return deriv(s)[2]; }

 private:
  Vec3 value(double s) const {
    if (s <= 0.0) return y_.front();
    if (s >= 1.0) return y_.back();
    int k = static_cast<int>(s * m_);
    if (k >= m_) k = m_ - 1;
    const double u = s / h_ - k;
    if (u == 0.0) return y_[k];
    // cubic Hermite on [t_k, t_{k+1}]
    const double u2 = u * u, u3 = u2 * u;
    const double b00 = 2 * u3 - 3 * u2 + 1, b10 = u3 - 2 * u2 + u;
    const double b01 = -2 * u3 + 3 * u2, b11 = u3 - u2;
    Vec3 out;
    for (int i = 0; i < 3; ++i)
      out[i] = b00 * y_[k][i] + b10 * h_ * dy_[k][i] + b01 * y_[k + 1][i] +
               b11 * h_ * dy_[k + 1][i];
    return out;
  }

  Vec3 deriv(double s) const { return coupled_full(par_, bump_, s, value(s)); }

  HParams par_;
  Bump bump_;
  int m_;
  double h_;
  std::vector<Vec3> y_, dy_;
};

}  // namespace

std::optional<double> leading_real_eigenvalue(const Mat2& b) {
  const double tr = b[0][0] + b[1][1];
  const double det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
  const double disc = tr * tr - 4.0 * det;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  const double r1 = 0.5 * (tr + root), r2 = 0.5 * (tr - root);
  return std::abs(r1) >= std::abs(r2) ? r1 : r2;
}

HSolution solve_h_coupled(double lambda, double alpha, const Bump& bump,
                          double c0, double d0, int grid_m, double rho) {
  if (grid_m < 8) throw std::invalid_argument("solve_h_coupled: grid_m too small");
  const HParams par = HParams::make(HVariant::CoupledGnse, lambda, alpha);
  auto ev = std::make_shared<CoupledEvaluator>(par, bump, c0, d0, grid_m);
  return sample_solution(HVariant::CoupledGnse, par, bump, c0, d0, rho, grid_m,
                         ev);
}

Mat2 gnse_boundary_matrix(double lambda, double alpha, const Bump& bump,
                          int grid_m) {
  const HParams par = HParams::make(HVariant::CoupledGnse, lambda, alpha);
  auto discard = [](int, const Vec3&) {};
  const Vec3 from_c = propagate_coupled(par, bump, Vec3{0.0, 1.0, 0.0}, grid_m, discard);
  const Vec3 from_d = propagate_coupled(par, bump, Vec3{0.0, 0.0, 1.0}, grid_m, discard);
  return {{{from_c[0], from_d[0]}, {from_c[1], from_d[1]}}};
}

GnseCalibration calibrate_monodromy_gnse(double lambda, double alpha,
                                         double r_target, const SearchBox& box,
                                         int grid_m, int workers) {
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::invalid_argument("calibrate_monodromy_gnse: need 0 < alpha < 1/2");
  if (!(r_target > 0.0))
    throw std::invalid_argument("calibrate_monodromy_gnse: r_target must be positive");

  const int n = std::max(1, box.n_coarse);
  const double dp = n > 1 ? (box.p_max - box.p_min) / (n - 1) : 0.0;
  const double dq = n > 1 ? (box.q_max - box.q_min) / (n - 1) : 0.0;

  struct Cell {
    double p, q, dist;
  };
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double p = box.p_min + i * dp;
      const double q = box.q_min + j * dq;
      cells.push_back({p, q, std::max(std::abs(p), std::abs(q))});
    }
  // expanding amplitude rings, lexicographic within a ring
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.p != b.p) return a.p < b.p;
    return a.q < b.q;
  });

  const int nworkers = workers > 0
      ? workers
      : std::max(1u, std::thread::hardware_concurrency());

  auto probe = [&](double p, double q) {
    return leading_real_eigenvalue(
        gnse_boundary_matrix(lambda, alpha, Bump{p, q}, grid_m));
  };

  double best = 0.0;
  std::optional<Cell> hit;
  const std::size_t chunk = std::max<std::size_t>(16, 4 * nworkers);
  for (std::size_t lo = 0; lo < cells.size() && !hit; lo += chunk) {
    const std::size_t hi = std::min(cells.size(), lo + chunk);
    std::vector<std::optional<double>> results(hi - lo);
    std::vector<std::future<void>> tasks;
    std::size_t per = (hi - lo + nworkers - 1) / nworkers;
    for (int wkr = 0; wkr < nworkers; ++wkr) {
      const std::size_t a = lo + wkr * per, b = std::min(hi, a + per);
      if (a >= b) break;
      tasks.push_back(std::async(std::launch::async, [&, a, b]() {
        for (std::size_t k = a; k < b; ++k)
          results[k - lo] = probe(cells[k].p, cells[k].q);
      }));
    }
    for (auto& t : tasks) t.get();
    for (std::size_t k = lo; k < hi; ++k) {
      const std::optional<double>& e = results[k - lo];
      if (!e) continue;
      best = std::max(best, std::abs(*e));
      if (std::abs(*e) > r_target) {
        hit = cells[k];
        break;
      }
    }
  }
  if (!hit) throw SearchExhaustedError(best);

  // local refinement around the first hit, keeping the largest |rho|
  double p0 = hit->p, q0 = hit->q;
  double rp = dp > 0 ? dp : 1.0, rq = dq > 0 ? dq : 1.0;
  for (int level = 0; level < 2; ++level) {
    double best_abs = std::abs(probe(p0, q0).value());
    double bp = p0, bq = q0;
    for (int i = -5; i <= 5; ++i)
      for (int j = -5; j <= 5; ++j) {
        const double p = p0 + i * rp / 5.0, q = q0 + j * rq / 5.0;
        if (p < box.p_min || p > box.p_max || q < box.q_min || q > box.q_max)
          continue;
        const std::optional<double> e = probe(p, q);
        if (e && std::abs(*e) > best_abs) {
          best_abs = std::abs(*e);
          bp = p;
          bq = q;
        }
      }
    p0 = bp;
    q0 = bq;
    rp /= 5.0;
    rq /= 5.0;
  }

  const Bump bump{p0, q0};
  const Mat2 b = gnse_boundary_matrix(lambda, alpha, bump, grid_m);
  const std::optional<double> e = leading_real_eigenvalue(b);
  if (!e || !(std::abs(*e) > r_target)) throw SearchExhaustedError(best);
  const double rho = *e;

  // eigenvector of B for rho; take the better-conditioned row form
  double v1a = b[0][1], v2a = rho - b[0][0];
  double v1b = rho - b[1][1], v2b = b[1][0];
  const double na = std::hypot(v1a, v2a), nb = std::hypot(v1b, v2b);
  double c0 = na >= nb ? v1a : v1b;
  double d0 = na >= nb ? v2a : v2b;
  const double norm = std::hypot(c0, d0);
  if (!(norm > 0.0)) throw SearchExhaustedError(best);
  if (std::abs(d0) >= 1e-8 * norm) {
    c0 /= d0;
    d0 = 1.0;
  } else {
    c0 /= norm;
    d0 /= norm;
  }

  const double res = std::hypot(b[0][0] * c0 + b[0][1] * d0 - rho * c0,
                                b[1][0] * c0 + b[1][1] * d0 - rho * d0);

  const HParams par = HParams::make(HVariant::CoupledGnse, lambda, alpha);
  auto ev = std::make_shared<CoupledEvaluator>(par, bump, c0, d0, grid_m);
  HSolution h = sample_solution(HVariant::CoupledGnse, par, bump, c0, d0, rho,
                                grid_m, ev);
  return {bump, c0, d0, rho, std::move(h), b, res};
}

}  // namespace dyad
