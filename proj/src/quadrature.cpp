#include "dyad/quadrature.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace dyad {
namespace {

inline double simpson_panel(const Fn& g, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  return (hi - lo) * (g(lo) + 4.0 * g(mid) + g(hi)) / 6.0;
}

// 5-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr std::array<double, 5> kGx = {
    -0.9061798459386639928, -0.5384693101056830910, 0.0,
    0.5384693101056830910, 0.9061798459386639928};
constexpr std::array<double, 5> kGw = {
    0.2369268850561890875, 0.4786286704993664680, 0.5688888888888888889,
    0.4786286704993664680, 0.2369268850561890875};

inline double gauss5_panel(const Fn& g, double lo, double hi) {
  const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
  double acc = 0.0;
  for (int i = 0; i < 5; ++i) acc += kGw[i] * g(c + r * kGx[i]);
  return r * acc;
}

}  // namespace

double integrate_simpson(const Fn& g, double a, double b, int panels) {
  if (panels < 1) throw std::invalid_argument("integrate_simpson: panels < 1");
  const double h = (b - a) / panels;
  double acc = 0.0;
  for (int i = 0; i < panels; ++i)
    acc += simpson_panel(g, a + i * h, a + (i + 1) * h);
  return acc;
}

double integrate_gauss5(const Fn& g, double a, double b, int panels) {
  if (panels < 1) throw std::invalid_argument("integrate_gauss5: panels < 1");
  const double h = (b - a) / panels;
  double acc = 0.0;
  for (int i = 0; i < panels; ++i)
    acc += gauss5_panel(g, a + i * h, a + (i + 1) * h);
  return acc;
}

CumulativeIntegral::CumulativeIntegral(Fn g, double upper, int m)
    : g_(std::move(g)), upper_(upper), h_(upper / m), m_(m) {
  if (m < 1) throw std::invalid_argument("CumulativeIntegral: m < 1");
  table_.resize(m_ + 1);
  table_[0] = 0.0;
  for (int i = 0; i < m_; ++i)
    table_[i + 1] = table_[i] + simpson_panel(g_, i * h_, (i + 1) * h_);
}

double CumulativeIntegral::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= upper_) return table_.back();
  int k = static_cast<int>(t / h_);
  if (k >= m_) k = m_ - 1;
  const double lo = k * h_;
  if (t == lo) return table_[k];
  return table_[k] + simpson_panel(g_, lo, t);
}

std::vector<double> cumulative_from_samples(double h,
                                            const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n < 4) {
    for (std::size_t i = 1; i < n; ++i)
      out[i] = out[i - 1] + 0.5 * h * (v[i - 1] + v[i]);
    return out;
  }
  // interval [i, i+1] integrated by the cubic through four nearby samples
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double inc;
    if (i == 0)
      inc = h * (9.0 * v[0] + 19.0 * v[1] - 5.0 * v[2] + v[3]) / 24.0;
    else if (i + 2 == n)
      inc = h * (9.0 * v[n - 1] + 19.0 * v[n - 2] - 5.0 * v[n - 3] + v[n - 4]) / 24.0;
    else
      inc = h * (-v[i - 1] + 13.0 * v[i] + 13.0 * v[i + 1] - v[i + 2]) / 24.0;
    out[i + 1] = out[i] + inc;
  }
  return out;
}

}  // namespace dyad
