#include <doctest.h>

#include <cmath>
#include <random>

#include "dyad/norms.hpp"
#include "dyad/rhs.hpp"

using namespace dyad;

namespace {

// Independent oracle: enumerates every product of the general system term by
// term from the coefficient triple, with no shared code with rhs().
struct TermOracle {
  std::vector<double> da, db;
  double term_scale = 0.0;

  TermOracle(const Model& m, const ShellState& s,
             const std::vector<double>& f) {
    const int n = s.n_shells();
    da.assign(n + 1, 0.0);
    db.assign(n + 1, 0.0);
    auto av = [&](int j) { return (j >= 0 && j <= n) ? s.a[j] : 0.0; };
    auto bv = [&](int j) { return (j >= 0 && j <= n) ? s.b[j] : 0.0; };
    auto w = [&](int j) { return j >= 0 ? m.coupling(j) : 0.0; };
    const CascadeCoeffs c = m.cascade();
    for (int j = 0; j <= n; ++j) {
      add_a(j, -m.nu * m.dissipation_a(j) * av(j));
      add_a(j, -c.a1 * w(j) * av(j) * av(j + 1));
      add_a(j, c.a1 * w(j - 1) * av(j - 1) * av(j - 1));
      if (m.uses_b()) {
        add_a(j, -c.a3 * w(j) * bv(j) * bv(j + 1));
        add_a(j, c.a3 * w(j - 1) * bv(j - 1) * bv(j - 1));
        add_b(j, -m.mu * m.dissipation_b(j) * bv(j));
        add_b(j, -c.a2 * w(j) * av(j) * bv(j + 1));
        add_b(j, c.a2 * w(j - 1) * av(j - 1) * bv(j - 1));
        add_b(j, -c.a3 * w(j) * bv(j) * av(j + 1));
        add_b(j, c.a3 * w(j - 1) * av(j - 1) * bv(j - 1));
      }
      add_a(j, f[j]);
    }
  }

  void add_a(int j, double term) {
    da[j] += term;
    term_scale += std::abs(term);
  }
  void add_b(int j, double term) {
    db[j] += term;
    term_scale += std::abs(term);
  }
};

ShellState random_state(int n, unsigned seed, double amp, double decay_base) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ShellState s(n);
  for (int j = 0; j <= n; ++j) {
    const double env = amp * std::pow(decay_base, -j);
    s.a[j] = u(rng) * env;
    s.b[j] = u(rng) * env;
  }
  return s;
}

}  // namespace

TEST_CASE("forward model rhs matches the hand expansion") {
  // theta = 2, N = 1, a = (1,0), b = 0, f = 0: da = (-1, 1)
  Model m = Model::mhd_forward(2.0, 2.0);
  ShellState s(1);
  s.a = {1.0, 0.0};
  std::vector<double> f = {0.0, 0.0};
  auto out = rhs(m, s, f);
  CHECK(out[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(out[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(out[2] == 0.0);
  CHECK(out[3] == 0.0);
}

TEST_CASE("zero state is an equilibrium of every unforced variant") {
  std::vector<double> f(9, 0.0);
  for (auto m : {Model::mhd_forward(2.0, 2.5), Model::mhd_mixed(2.0, 2.0),
                 Model::nse_classic(2.0, 2.0), Model::nse_fractional(2.0, 0.4),
                 Model::mhd_fractional(2.0, 0.3, 0.4)}) {
    ShellState s(8);
    for (double v : rhs(m, s, f)) CHECK(v == 0.0);
  }
}

TEST_CASE("rhs agrees with the term-by-term oracle on every variant") {
  std::vector<Model> models = {
      Model::mhd_forward(2.0, 2.5),
      Model::mhd_mixed(2.0, 2.0, 0.0, 0.0),
      Model::general_mhd(1.7, 1.5, {0.3, -1.2, 2.0}),
      Model::nse_classic(2.0, 2.0),
      Model::nse_fractional(2.0, 0.4),
      Model::mhd_fractional(2.0, 0.3, 0.4),
  };
  for (std::size_t k = 0; k < models.size(); ++k) {
    const Model& m = models[k];
    ShellState s = random_state(9, 17 + k, 1.0, m.lambda);
    if (!m.uses_b()) std::fill(s.b.begin(), s.b.end(), 0.0);
    std::vector<double> f(10);
    std::mt19937_64 rng(99 + k);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& v : f) v = u(rng);
    const auto out = rhs(m, s, f);
    const TermOracle oracle(m, s, f);
    for (int j = 0; j <= 9; ++j) {
      CHECK(std::abs(out[j] - oracle.da[j]) <= 1e-14 * oracle.term_scale);
      CHECK(std::abs(out[10 + j] - oracle.db[j]) <= 1e-14 * oracle.term_scale);
    }
  }
}

TEST_CASE("rhs input validation") {
  Model m = Model::mhd_forward(2.0, 2.0);
  ShellState s(3);
  std::vector<double> f(3, 0.0);  // wrong length
  CHECK_THROWS_AS((void)rhs(m, s, f), std::invalid_argument);

  std::vector<double> f4(4, 0.0);
  s.a[1] = std::nan("");
  CHECK_THROWS_AS((void)rhs(m, s, f4), std::invalid_argument);

  Model nse = Model::nse_classic(2.0, 2.0);
  ShellState sb(3);
  sb.b[2] = 0.5;
  CHECK_THROWS_AS((void)rhs(nse, sb, f4), std::invalid_argument);
}

TEST_CASE("energy, cross helicity and Sobolev norms") {
  ShellState s(1);
  s.a = {3.0, 4.0};
  s.b = {0.0, 0.0};
  CHECK(energy(s) == doctest::Approx(12.5).epsilon(1e-15));

  ShellState t(1);
  t.a = {1.0, 2.0};
  t.b = {3.0, -1.0};
  CHECK(cross_helicity(t) == doctest::Approx(1.0).epsilon(1e-15));

  // unit impulse at shell j has ||a||_s = lambda^{js}
  for (int j : {0, 3, 7}) {
    ShellState u(8);
    u.a[j] = 1.0;
    for (double order : {-1.0, 0.0, 0.7, 2.0}) {
      const auto [na, nb] = sobolev_norm(u, 2.0, order);
      CHECK(na == doctest::Approx(std::pow(2.0, j * order)).epsilon(1e-14));
      CHECK(nb == 0.0);
    }
  }

  // order zero is exactly the l2 norm
  ShellState r = random_state(12, 5, 0.8, 2.0);
  const auto [l2a, l2b] = sobolev_norm(r, 2.0, 0.0);
  double sa = 0.0, sb = 0.0;
  for (double v : r.a) sa += v * v;
  for (double v : r.b) sb += v * v;
  CHECK(l2a == doctest::Approx(std::sqrt(sa)).epsilon(1e-15));
  CHECK(l2b == doctest::Approx(std::sqrt(sb)).epsilon(1e-15));

  auto report = make_norm_report(r, 2.0, std::vector<double>{0.0, 1.0});
  CHECK(report.energy == doctest::Approx(0.5 * (sa + sb)).epsilon(1e-15));
  CHECK(report.l2_a == doctest::Approx(std::sqrt(sa)).epsilon(1e-15));
}

TEST_CASE("nonlinear energy flux telescopes for both presets") {
  for (bool mixed : {false, true}) {
    for (int n : {1, 4, 16, 64}) {
      for (unsigned seed = 0; seed < 8; ++seed) {
        Model m = mixed ? Model::mhd_mixed(2.0, 2.0, 0.0, 0.0)
                        : Model::mhd_forward(2.0, 2.0, 0.0, 0.0);
        ShellState s = random_state(n, 1000 * n + seed, 0.7, std::sqrt(2.0));
        double scale = 0.0;
        const double flux = nonlinear_energy_flux(m, s, &scale);
        CHECK(std::abs(flux) <= 1e-12 * std::max(scale, 1e-300));
      }
    }
  }
}

TEST_CASE("zero state has zero flux") {
  Model m = Model::mhd_forward(2.0, 2.0);
  ShellState s(16);
  CHECK(nonlinear_energy_flux(m, s) == 0.0);
  CHECK(nonlinear_cross_helicity_flux(m, s) == 0.0);
}

TEST_CASE("cross helicity flux: conserved for mixed, not for forward") {
  for (int n : {4, 16}) {
    for (unsigned seed = 0; seed < 8; ++seed) {
      Model m = Model::mhd_mixed(2.0, 2.0, 0.0, 0.0);
      ShellState s = random_state(n, 77 * n + seed, 0.7, std::sqrt(2.0));
      double scale = 0.0;
      const double flux = nonlinear_cross_helicity_flux(m, s, &scale);
      CHECK(std::abs(flux) <= 1e-12 * std::max(scale, 1e-300));
    }
  }
  // documented witness state for the forward model
  Model fw = Model::mhd_forward(2.0, 2.0, 0.0, 0.0);
  ShellState w(1);
  w.a = {1.0, 0.0};
  w.b = {1.0, 1.0};
  CHECK(std::abs(nonlinear_cross_helicity_flux(fw, w)) > 1e-3);
}

TEST_CASE("quadratic terms are homogeneous of degree two") {
  for (auto m : {Model::mhd_forward(2.0, 2.5), Model::mhd_mixed(2.0, 2.0),
                 Model::mhd_fractional(2.0, 0.3, 0.4)}) {
    ShellState s = random_state(10, 11, 0.9, 2.0);
    ShellState s2 = s;
    for (double& v : s2.a) v *= 2.0;
    for (double& v : s2.b) v *= 2.0;
    std::vector<double> da(11), db(11), da2(11), db2(11);
    rhs_nonlinear(m, s, da, db);
    rhs_nonlinear(m, s2, da2, db2);
    for (int j = 0; j <= 10; ++j) {
      CHECK(da2[j] == doctest::Approx(4.0 * da[j]).epsilon(1e-13));
      CHECK(db2[j] == doctest::Approx(4.0 * db[j]).epsilon(1e-13));
    }
  }
}

TEST_CASE("preset coefficients are pinned") {
  CHECK(Model::mhd_forward(2.0, 2.0).cascade().a1 == 1.0);
  CHECK(Model::mhd_forward(2.0, 2.0).cascade().a2 == -1.0);
  CHECK(Model::mhd_forward(2.0, 2.0).cascade().a3 == 1.0);
  CHECK(Model::mhd_mixed(2.0, 2.0).cascade().a1 == 1.0);
  CHECK(Model::mhd_mixed(2.0, 2.0).cascade().a2 == 1.0);
  CHECK(Model::mhd_mixed(2.0, 2.0).cascade().a3 == -1.0);
  CHECK_THROWS_AS(Model::mhd_forward(1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(Model::mhd_forward(2.0, -1.0), std::invalid_argument);
}
