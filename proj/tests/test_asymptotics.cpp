#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reeblab/asymptotics.hpp"

using namespace reeblab;

namespace {

LoopField loop_from(const std::function<cplx(double)>& f, std::size_t N = 64) {
  LoopField l;
  l.values.resize(N);
  for (std::size_t j = 0; j < N; ++j) l.values[j] = f(kTwoPi * j / N);
  return l;
}

HalfCylinderField cylinder_from(const std::function<cplx(double, double)>& f, double s0,
                                double s1, std::size_t rows, std::size_t nt) {
  HalfCylinderField h;
  h.n_t = nt;
  h.s_grid = linspace(s0, s1, rows);
  h.values.assign(rows, std::vector<cplx>(nt));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < nt; ++j) h.values[i][j] = f(h.s_grid[i], kTwoPi * j / nt);
  return h;
}

}  // namespace

TEST_CASE("asymptotic operator on constants and rotating eigenloops") {
  const double kappa = -0.7;
  const auto c = loop_from([](double) { return cplx(0.4, -1.1); });
  const auto Ac = asymptotic_apply(kappa, c);
  for (const auto& z : Ac.values) CHECK(std::abs(z - kappa * cplx(0.4, -1.1)) < 1e-13);

  for (int l : {-3, -1, 0, 2, 5}) {
    const auto e = loop_from([l](double t) { return std::exp(cplx(0.0, l * t)) * cplx(1.0, 0.5); });
    const auto Ae = asymptotic_apply(kappa, e);
    for (std::size_t j = 0; j < e.size(); ++j)
      CHECK(std::abs(Ae.values[j] - (kappa + l) * e.values[j]) < 1e-11);
  }
}

TEST_CASE("asymptotic operator is linear and symmetric") {
  const double kappa = -0.7;
  Rng rng(4);
  LoopField h, g;
  h.values.resize(64);
  g.values.resize(64);
  for (std::size_t j = 0; j < 64; ++j) {
    h.values[j] = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    g.values[j] = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  }
  LoopField sum = h;
  for (std::size_t j = 0; j < 64; ++j) sum.values[j] += g.values[j];
  const auto A_sum = asymptotic_apply(kappa, sum);
  const auto Ah = asymptotic_apply(kappa, h);
  const auto Ag = asymptotic_apply(kappa, g);
  double lin = 0.0, sym = 0.0, sym_ref = 0.0;
  for (std::size_t j = 0; j < 64; ++j)
    lin = std::max(lin, std::abs(A_sum.values[j] - Ah.values[j] - Ag.values[j]));
  CHECK(lin < 1e-12);
  // real L2 pairing <u, v> = sum Re(u conj(v))
  for (std::size_t j = 0; j < 64; ++j) {
    sym += (Ah.values[j] * std::conj(g.values[j])).real();
    sym_ref += (h.values[j] * std::conj(Ag.values[j])).real();
  }
  CHECK(std::fabs(sym - sym_ref) < 1e-10);
}

TEST_CASE("spectrum: lattice of eigenvalues with multiplicity two") {
  const auto nearest = spectrum(-0.7, 64, 3);
  REQUIRE(nearest.size() == 3);
  CHECK(nearest[0].value == doctest::Approx(-1.7).epsilon(1e-10));
  CHECK(nearest[1].value == doctest::Approx(-0.7).epsilon(1e-10));
  CHECK(nearest[2].value == doctest::Approx(0.3).epsilon(1e-10));
  for (const auto& c : nearest) CHECK(c.multiplicity == 2);

  // kappa = 0: integer spectrum, kernel of dimension two
  const auto zero = spectrum(0.0, 32, 5);
  bool found_zero = false;
  for (const auto& c : zero)
    if (std::fabs(c.value) < 1e-10) {
      found_zero = true;
      CHECK(c.multiplicity == 2);
    }
  CHECK(found_zero);

  // largest negative eigenvalue for kappa in (-1, 0) is kappa
  const auto all = spectrum(-0.7, 64, 64);
  double largest_neg = -1e300;
  for (const auto& c : all)
    if (c.value < 0) largest_neg = std::max(largest_neg, c.value);
  CHECK(largest_neg == doctest::Approx(-0.7).epsilon(1e-10));
}

TEST_CASE("circle degree") {
  CHECK(circle_degree(loop_from([](double t) { return std::exp(cplx(0.0, 3 * t)); })) == 3);
  CHECK(circle_degree(loop_from([](double) { return cplx(1.0, 0.0); })) == 0);
  CHECK(circle_degree(loop_from([](double t) { return cplx(std::cos(t), -std::sin(t)); })) == -1);

  // invariant under positive pointwise rescaling
  const auto scaled = loop_from([](double t) {
    return (2.0 + std::sin(5 * t)) * std::exp(cplx(0.0, 2 * t));
  });
  CHECK(circle_degree(scaled) == 2);

  LoopField z = loop_from([](double t) { return std::exp(cplx(0.0, t)); });
  z.values[10] = cplx(1e-15, 0.0);
  CHECK_THROWS_AS(circle_degree(z), std::invalid_argument);
}

TEST_CASE("relative asymptotics recover the generated decay data") {
  // leading term only, l = 0
  const auto d0 = cylinder_from(
      [](double s, double) { return std::exp(-0.7 * s) * cplx(1.0, 0.3); }, 0.0, 8.0, 48, 32);
  const auto f0 = relative_asymptotics_fit(d0);
  CHECK(f0.lambda_hat == doctest::Approx(-0.7).epsilon(1e-10));
  CHECK(f0.winding == 0);

  // l = 1 pattern
  const auto d1 = cylinder_from(
      [](double s, double t) { return std::exp(-0.7 * s) * std::exp(cplx(0.0, t)); }, 0.0, 8.0,
      48, 32);
  const auto f1 = relative_asymptotics_fit(d1);
  CHECK(f1.lambda_hat == doctest::Approx(-0.7).epsilon(1e-10));
  CHECK(f1.winding == 1);

  // two-term generator: remainder decays one unit faster
  Rng rng(8);
  std::vector<cplx> noise(32);
  for (auto& z : noise) z = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  const auto d2 = cylinder_from(
      [&](double s, double t) {
        const std::size_t j = static_cast<std::size_t>(t / kTwoPi * 32) % 32;
        return std::exp(-0.7 * s) * cplx(1.0, 0.0) + 0.1 * std::exp(-1.7 * s) * noise[j];
      },
      0.0, 8.0, 48, 32);
  const auto f2 = relative_asymptotics_fit(d2);
  CHECK(std::fabs(f2.lambda_hat + 0.7) < 1e-3);
  CHECK(std::fabs(f2.remainder_rate - 1.0) < 0.15);

  // a vanishing tail row is rejected
  auto bad = d0;
  for (auto& z : bad.values[40]) z = 0.0;
  CHECK_THROWS_AS(relative_asymptotics_fit(bad), std::invalid_argument);
}

TEST_CASE("zero bookkeeping between rows") {
  // field built from roots of a polynomial in w = e^{s+it}
  auto field_from_roots = [](const std::vector<std::pair<cplx, int>>& roots) {
    return cylinder_from(
        [&](double s, double t) {
          const cplx w = std::exp(cplx(s, t));
          cplx v(1.0, 0.0);
          for (const auto& [z0, order] : roots)
            for (int o = 0; o < order; ++o) v *= (w - z0) / 10.0;
          return v;
        },
        0.0, 3.0, 120, 128);
  };

  // single simple zero between the rows
  {
    const auto f = field_from_roots({{std::exp(cplx(1.5, 1.0)), 1}});
    const auto rep = zero_count_check(f, 0.2, 2.8);
    CHECK(rep.deg_lo == 0);
    CHECK(rep.deg_hi == 1);
    CHECK(rep.zero_order_sum == 1);
    CHECK(rep.consistent);
  }
  // zero-free strip
  {
    const auto f = field_from_roots({{std::exp(cplx(-1.0, 0.3)), 1}});
    const auto rep = zero_count_check(f, 0.2, 2.8);
    CHECK(rep.deg_lo == rep.deg_hi);
    CHECK(rep.zero_order_sum == 0);
    CHECK(rep.consistent);
  }
  // double zero
  {
    const auto f = field_from_roots({{std::exp(cplx(1.2, 4.0)), 2}});
    const auto rep = zero_count_check(f, 0.2, 2.8);
    CHECK(rep.zero_order_sum == 2);
    CHECK(rep.consistent);
  }
}
