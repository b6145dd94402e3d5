#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reeblab/leaves.hpp"

using namespace reeblab;

namespace {
LeafProfile synthetic_leaf(double rate, double r0, double span, double step) {
  LeafProfile lp;
  lp.step = step;
  lp.kappa = rate;
  for (double s = 0.0; s <= span + 1e-12; s += step) {
    lp.s_grid.push_back(s);
    lp.r_of_s.push_back(r0 * std::exp(rate * s));
    lp.a_of_s.push_back(s);
  }
  lp.kappa_hat = decay_exponent_fit(lp);
  return lp;
}
}  // namespace

TEST_CASE("radial ODE solution matches the ellipsoid closed form") {
  const auto p = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  const auto leaf = solve_radial_profile(p, 0.1, 1.0, 1e-3);
  const double c = 1.0 / (0.1 * 0.1) - 1.0;
  const double ref = 1.0 / std::sqrt(1.0 + c * std::exp(2.0 * 0.7 * 1.0));
  CHECK(leaf.r_of_s.back() == doctest::Approx(ref).epsilon(1e-9));
  CHECK(ref == doctest::Approx(4.985e-2).epsilon(1e-3));

  // monotonicity
  for (std::size_t i = 0; i + 1 < leaf.r_of_s.size(); ++i) {
    CHECK(leaf.r_of_s[i + 1] < leaf.r_of_s[i]);
    CHECK(leaf.a_of_s[i + 1] > leaf.a_of_s[i]);
  }
}

TEST_CASE("example1 solutions satisfy the implicit closed form") {
  const auto p = make_example_profile(ProfileKind::example1, 1.0, 0.7);
  const auto leaf = solve_radial_profile(p, 0.1, 10.0, 1e-3);
  double cmin = 1e300, cmax = -1e300;
  for (std::size_t i = 0; i < leaf.s_grid.size(); ++i) {
    const double r = leaf.r_of_s[i];
    const double c = r * std::exp(0.7 * leaf.s_grid[i]) * std::exp(-0.5 * r * r);
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }
  CHECK(cmax - cmin < 1e-6);
}

TEST_CASE("solve_radial_profile rejects bad arguments") {
  const auto p = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  CHECK_THROWS_AS(solve_radial_profile(p, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_radial_profile(p, 1.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_radial_profile(p, 0.1, -1.0), std::invalid_argument);
}

TEST_CASE("admissible structure: frame entries, square, compatibility") {
  const auto p = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double r = rng.uniform(1e-3, 0.99);
    const Mat2 J = admissible_J(p, r);
    const Mat2 J2 = J * J;
    CHECK(std::fabs(J2.a + 1.0) < 1e-12);
    CHECK(std::fabs(J2.d + 1.0) < 1e-12);
    CHECK(std::fabs(J2.b) < 1e-12);
    CHECK(std::fabs(J2.c) < 1e-12);
    const double h = structure_h(p, r);
    const double mu = derived_quantities(p, r).mu;
    CHECK(h * mu > 0.0);
    CHECK(mu / h > 0.0);
    if (r <= 0.1) {
      CHECK(J.b == doctest::Approx(-r * p.gamma1(r)).epsilon(1e-13));
      CHECK(J.c == doctest::Approx(1.0 / (r * p.gamma1(r))).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(admissible_J(p, 0.0), std::invalid_argument);
}

TEST_CASE("structure blend is continuous and flat outside the collar") {
  const auto p = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  CHECK(structure_h(p, 0.1) == doctest::Approx(1.0 / (0.1 * p.gamma1(0.1))).epsilon(1e-13));
  CHECK(structure_h(p, 0.9) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(structure_h(p, 0.95) == 1.0);
  double prev = structure_h(p, 0.1);
  for (double r : linspace(0.10001, 0.9, 100)) {
    const double h = structure_h(p, r);
    CHECK(h > 0.0);
    CHECK(h <= prev * (1.0 + 1e-9));  // monotone blend for the examples
    prev = h;
  }
}

TEST_CASE("holomorphy residual is at integrator accuracy and detects fakes") {
  const auto p = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  const auto leaf = solve_radial_profile(p, 0.1, 10.0, 1e-3);
  CHECK(holomorphy_residual(leaf, p) < 1e-8);

  LeafProfile shifted = leaf;
  for (auto& r : shifted.r_of_s) r += 1e-3;
  CHECK(holomorphy_residual(shifted, p) > 1e-5);

  // constant-radius fake: residual equals |Lambda(r) r| at that radius
  LeafProfile fake;
  fake.step = 1e-2;
  fake.kappa = p.kappa();
  for (double s = 0.0; s <= 1.0 + 1e-12; s += fake.step) {
    fake.s_grid.push_back(s);
    fake.r_of_s.push_back(0.05);
    fake.a_of_s.push_back(p.gamma1(0.05) * s);
  }
  const double lam = p.gamma1(0.05, 1) * p.gamma1(0.05) / derived_quantities(p, 0.05).mu;
  CHECK(holomorphy_residual(fake, p) == doctest::Approx(std::fabs(lam * 0.05)).epsilon(1e-10));
}

TEST_CASE("leaf-profile mismatch is rejected through the parametrized leaf") {
  const auto p2 = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  const auto p_other = make_example_profile(ProfileKind::example2, 1.0, 0.55);
  const auto leaf = solve_radial_profile(p2, 0.1, 2.0, 1e-3);
  GirouxLeaf gl{0.3, &leaf};
  CHECK_NOTHROW(holomorphy_residual(gl, p2));
  CHECK_THROWS_AS(holomorphy_residual(gl, p_other), std::invalid_argument);
}

TEST_CASE("residual converges at fourth order under step refinement") {
  const auto p = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  std::vector<double> lh, lr;
  for (double h : {0.04, 0.02, 0.01}) {
    lh.push_back(std::log(h));
    lr.push_back(std::log(holomorphy_residual(solve_radial_profile(p, 0.1, 10.0, h), p)));
  }
  CHECK(fit_line(lh, lr).slope >= 3.8);
}

TEST_CASE("decay exponent fits") {
  const auto p2 = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  const auto l2 = solve_radial_profile(p2, 0.1, 20.0, 1e-3);
  CHECK(std::fabs(l2.kappa_hat + 0.7) < 1e-4);

  const auto p1 = make_example_profile(ProfileKind::example1, 1.0, 0.7);
  const auto l1 = solve_radial_profile(p1, 0.1, 20.0, 1e-3);
  CHECK(std::fabs(l1.kappa_hat + 0.7) < 1e-3);

  const auto syn = synthetic_leaf(-1.0, 0.5, 10.0, 1e-2);
  CHECK(std::fabs(syn.kappa_hat + 1.0) < 1e-10);
}

TEST_CASE("tail factor c(s) is one-signed monotone and settles") {
  // decreasing for example1; the ellipsoid closed form makes it increasing
  for (auto kind : {ProfileKind::example1, ProfileKind::example2}) {
    const auto p = make_example_profile(kind, 1.0, 0.7);
    const auto leaf = solve_radial_profile(p, 0.1, 20.0, 1e-3);
    std::vector<double> c(leaf.s_grid.size());
    for (std::size_t i = 0; i < c.size(); ++i)
      c[i] = leaf.r_of_s[i] * std::exp(0.7 * leaf.s_grid[i]);
    int sign = 0;
    for (std::size_t i = 1; i < c.size(); ++i) {
      const int s = (c[i] > c[i - 1]) ? 1 : -1;
      if (sign == 0) sign = s;
      if (std::fabs(c[i] - c[i - 1]) > 1e-14) CHECK(s == sign);
    }
    CHECK(sign == (kind == ProfileKind::example1 ? -1 : 1));
    const std::size_t q0 = (3 * c.size()) / 4;
    CHECK(std::fabs(c.back() - c[q0]) / std::fabs(c.back()) < 0.01);
  }
}

TEST_CASE("a(s) slope increases toward gamma1(0)") {
  const auto p = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  const auto leaf = solve_radial_profile(p, 0.1, 20.0, 1e-3);
  // a'(s) = gamma1(r(s)) increases as r decreases
  double prev = p.gamma1(leaf.r_of_s.front());
  for (std::size_t i = 1; i < leaf.r_of_s.size(); i += 500) {
    const double cur = p.gamma1(leaf.r_of_s[i]);
    CHECK(cur >= prev);
    prev = cur;
  }
  CHECK(prev < p.gamma1(0.0) + 1e-12);
}

TEST_CASE("frame matrices along the leaf") {
  const auto p = make_example_profile(ProfileKind::example1, 1.0, 0.7);
  const auto leaf = solve_radial_profile(p, 0.1, 20.0, 1e-3);

  const auto same = appendix_frames(p, 0.4, 0.4, 2.0, leaf);
  CHECK(same.j_diff.max_abs() == 0.0);

  Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    const double tau = rng.uniform(-0.5, 0.5);
    const double s = rng.uniform(0.5, 15.0);
    const auto fr = appendix_frames(p, tau, 0.0, s, leaf);
    const Mat2 sq = fr.j_tau * fr.j_tau;
    CHECK(std::fabs(sq.a + 1.0) < 1e-10);
    CHECK(std::fabs(sq.d + 1.0) < 1e-10);
    CHECK(std::fabs(sq.b) < 1e-10);
    CHECK(std::fabs(sq.c) < 1e-10);
    CHECK(fr.flow_matrix.det() == 1.0);
  }

  // difference is linear in tau - sigma at fixed s
  const auto d1 = appendix_frames(p, 0.3, 0.1, 3.0, leaf).j_diff;
  const auto d2 = appendix_frames(p, 0.5, 0.1, 3.0, leaf).j_diff;
  CHECK(d2.a == doctest::Approx(2.0 * d1.a).epsilon(1e-10));

  // projection matrix kills the Reeb direction structurally: the eta2
  // coefficient of X is (alpha g1' + beta g2')/mu = 0
  const double r = leaf.r_of_s[1000];
  const auto q = derived_quantities(p, r);
  CHECK(std::fabs(q.alpha * p.gamma1(r, 1) + q.beta * p.gamma2(r, 1)) < 1e-12);
}

TEST_CASE("frame coefficient decays at the predicted exponent") {
  const auto p = make_example_profile(ProfileKind::example1, 1.0, 0.7);
  const auto leaf = solve_radial_profile(p, 0.1, 20.0, 1e-3);
  const double slope = appendix_coefficient_exponent(p, leaf);
  CHECK(std::fabs(slope - 0.4) < 0.02);
}

TEST_CASE("energy of the trivial cylinder approaches the orbit period") {
  const auto p = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  // cylinder over the binding orbit: r = 0, a = gamma1(0) s
  LeafProfile cyl;
  cyl.step = 1e-2;
  cyl.kappa = p.kappa();
  for (double s = 0.0; s <= 40.0 + 1e-9; s += cyl.step) {
    cyl.s_grid.push_back(s);
    cyl.r_of_s.push_back(0.0);
    cyl.a_of_s.push_back(p.gamma1(0.0) * s);
  }
  const double a_max = cyl.a_of_s.back();
  // phi == 1: both energy terms vanish on the cylinder
  const auto flat = energy_terms(cyl, p, [](double) { return 1.0; });
  CHECK(std::fabs(flat.dlambda_term) < 1e-12);
  CHECK(std::fabs(flat.a_term) < 1e-12);
  // a smoothed step deep inside the range recovers the full period
  const double w = a_max / 16.0;
  const auto stepped =
      energy_terms(cyl, p, [=](double x) { return smoothstep7((x - a_max / 2) / w + 0.5); });
  CHECK(stepped.dlambda_term == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(stepped.a_term == doctest::Approx(kTwoPi * p.gamma1(0.0)).epsilon(1e-6));
}

TEST_CASE("energy estimate: degenerate leaf, truncation stability, monotone guard") {
  const auto p = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  LeafProfile constant;
  constant.step = 1e-2;
  constant.kappa = p.kappa();
  for (double s = 0.0; s <= 5.0; s += constant.step) {
    constant.s_grid.push_back(s);
    constant.r_of_s.push_back(0.3);
    constant.a_of_s.push_back(0.0);  // constant map: nothing advances
  }
  CHECK(energy_estimate(constant, p, default_energy_family(constant)) ==
        doctest::Approx(0.0).epsilon(1e-12));

  const auto l10 = solve_radial_profile(p, 0.1, 10.0, 1e-3);
  const auto l20 = solve_radial_profile(p, 0.1, 20.0, 1e-3);
  const auto family = default_energy_family(l10);
  const double e10 = energy_estimate(l10, p, family);
  const double e20 = energy_estimate(l20, p, family);
  CHECK(std::fabs(e10 - e20) / e10 < 0.01);

  CHECK_THROWS_AS(energy_estimate(l10, p, {[](double x) { return -0.1 * x; }}),
                  std::invalid_argument);
}
