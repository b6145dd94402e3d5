#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "reeblab/profiles.hpp"

using namespace reeblab;

TEST_CASE("example profiles reproduce their closed-form mu and kappa") {
  const auto p2 = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  CHECK(p2.kappa() == doctest::Approx(-0.7).epsilon(1e-14));
  for (double r : {0.05, 0.2, 0.5, 0.9}) {
    const auto q = derived_quantities(p2, r);
    CHECK(q.mu == doctest::Approx(2.0 * r * 1.0 / 0.7).epsilon(1e-13));
  }
  const auto p1 = make_example_profile(ProfileKind::example1, 1.0, 0.7);
  for (double r : {0.05, 0.2, 0.5, 0.9}) {
    const auto q = derived_quantities(p1, r);
    CHECK(q.mu ==
          doctest::Approx((2.0 * r / 0.7) * std::pow(1.0 - r * r, 2)).epsilon(1e-13));
  }
}

TEST_CASE("integer and sub-half kT are rejected") {
  CHECK_THROWS_AS(make_example_profile(ProfileKind::example2, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_example_profile(ProfileKind::example1, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_example_profile(ProfileKind::example2, 1.0, 0.3), std::invalid_argument);
  CHECK_NOTHROW(make_example_profile(ProfileKind::example2, 1.0, 0.5));  // boundary kappa = -1/2
}

TEST_CASE("derived quantities: closed-form A and axis limits") {
  const auto p1 = make_example_profile(ProfileKind::example1, 1.0, 0.7);
  const auto q = derived_quantities(p1, 0.5);
  const double A_ref = 4.0 * 0.7 * 0.5 / std::pow(1.0 - 0.25, 4);
  CHECK(q.bigA == doctest::Approx(A_ref).epsilon(1e-12));
  CHECK(q.bigA == doctest::Approx(4.4247).epsilon(1e-4));

  const auto p2 = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  const auto q0 = derived_quantities(p2, 0.0);
  CHECK(q0.alpha == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(q0.beta == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(q0.bigA == 0.0);

  // d alpha / dr -> 0 at the axis (central difference at small radii)
  for (const auto& p : {p1, p2}) {
    const double h = 1e-4;
    const double d = (derived_quantities(p, 2 * h).alpha - derived_quantities(p, h).alpha) / h;
    CHECK(std::fabs(d) < 1e-3);
  }
}

TEST_CASE("out-of-range radius is rejected") {
  const auto p1 = make_example_profile(ProfileKind::example1, 1.0, 0.7);
  CHECK_THROWS_AS(derived_quantities(p1, 0.99), std::invalid_argument);  // r_max = 0.95
  CHECK_THROWS_AS(derived_quantities(p1, -0.1), std::invalid_argument);
}

TEST_CASE("validation passes on both examples; ellipsoid A-margin is exactly zero") {
  for (auto kind : {ProfileKind::example1, ProfileKind::example2}) {
    const auto p = make_example_profile(kind, 1.0, 0.7);
    const auto rep = validate_local_model(p, 64);
    CHECK(rep.pass);
    CHECK(rep.conditions.size() == 6);
    if (kind == ProfileKind::example2) CHECK(rep.conditions[5].margin == 0.0);
  }
}

TEST_CASE("validation needs at least 16 samples") {
  const auto p = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  CHECK_THROWS_AS(validate_local_model(p, 8), std::invalid_argument);
}

TEST_CASE("a spline with increasing gamma1 fails condition 3 with negative margin") {
  BindingProfile p;
  p.kind = ProfileKind::spline;
  p.r_max = 1.0;
  // gamma1 rises after r = 0.5; gamma2 = r^2-ish
  for (double r : {0.0, 0.1, 0.25, 0.5, 0.75, 1.0}) {
    const double g1 = (r < 0.5) ? 1.0 - 0.4 * r * r : 0.9 + 0.4 * (r - 0.5) * (r - 0.5);
    const double d1 = (r < 0.5) ? -0.8 * r : 0.8 * (r - 0.5);
    p.knots.push_back({r, g1, d1, r * r, 2.0 * r});
  }
  p.rebuild_spline();
  const auto rep = validate_local_model(p, 64);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.conditions[2].pass);
  CHECK(rep.conditions[2].margin < 0.0);
}

TEST_CASE("designed interpolation curve validates and turns counterclockwise") {
  const auto p = design_interpolation_curve(0.1, 0.1, 1.0, -0.7);
  CHECK(p.kappa() == doctest::Approx(-0.7).epsilon(1e-6));
  const auto rep = validate_local_model(p, 64);
  CHECK(rep.pass);

  // exact tail
  CHECK(p.gamma1(0.95) == doctest::Approx(-0.1 * 0.95).epsilon(1e-9));
  CHECK(p.gamma2(0.95) == doctest::Approx(1.0).epsilon(1e-9));

  // mu = Re(i gamma conj(gamma')) = rho^2 alpha' > 0 pointwise
  for (double r : linspace(1e-3, 1.0, 200)) {
    const cplx g(p.gamma1(r), p.gamma2(r));
    const cplx dg(p.gamma1(r, 1), p.gamma2(r, 1));
    const double mu_polar = (cplx(0.0, 1.0) * g * std::conj(dg)).real();
    const double mu_direct = p.gamma1(r) * p.gamma2(r, 1) - p.gamma1(r, 1) * p.gamma2(r);
    CHECK(mu_polar == doctest::Approx(mu_direct).epsilon(1e-10));
    CHECK(mu_polar > 0.0);
  }
}

TEST_CASE("designed curve rejects integer and sub-half kappa") {
  CHECK_THROWS_AS(design_interpolation_curve(0.1, 0.1, 1.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(design_interpolation_curve(0.1, 0.1, 1.0, -0.3), std::invalid_argument);
  CHECK_THROWS_AS(design_interpolation_curve(-0.1, 0.1, 1.0, -0.7), std::invalid_argument);
}

TEST_CASE("designed curve is bit-reproducible") {
  const auto a = design_interpolation_curve(0.1, 0.1, 1.0, -0.7);
  const auto b = design_interpolation_curve(0.1, 0.1, 1.0, -0.7);
  REQUIRE(a.knots.size() == b.knots.size());
  CHECK(std::memcmp(a.knots.data(), b.knots.data(), a.knots.size() * sizeof(SplineKnot)) == 0);
}

TEST_CASE("mu(r)/r approaches gamma1(0) gamma2''(0) within 1 percent") {
  for (auto kind : {ProfileKind::example1, ProfileKind::example2}) {
    const auto p = make_example_profile(kind, 1.0, 0.7);
    const double target = p.gamma1(0.0) * p.gamma2(0.0, 2);
    std::vector<double> xs{1e-2, 1e-3, 1e-4}, ys;
    for (double r : xs) ys.push_back(derived_quantities(p, r).mu / r);
    CHECK(std::fabs(richardson_limit(xs, ys, 2.0) - target) < 0.01 * std::fabs(target));
  }
}

TEST_CASE("leaf-ODE coefficient limit recovers kappa to 1e-6") {
  for (auto kind : {ProfileKind::example1, ProfileKind::example2}) {
    const auto p = make_example_profile(kind, 1.0, 0.7);
    auto Lambda = [&](double r) {
      const auto q = derived_quantities(p, r);
      return p.gamma1(r, 1) * p.gamma1(r) / q.mu;
    };
    std::vector<double> xs{1e-2, 5e-3, 2.5e-3}, ys;
    for (double r : xs) ys.push_back(Lambda(r));
    CHECK(std::fabs(richardson_limit(xs, ys, 2.0) - p.kappa()) < 1e-6);
  }
}

TEST_CASE("beta is constant for the ellipsoid and increasing for example1") {
  const auto p2 = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  for (double r : {0.1, 0.3, 0.6, 0.9})
    CHECK(derived_quantities(p2, r).beta == doctest::Approx(0.7).epsilon(1e-13));
  const auto p1 = make_example_profile(ProfileKind::example1, 1.0, 0.7);
  double prev = derived_quantities(p1, 0.01).beta;
  for (double r : linspace(0.05, 0.7, 20)) {
    const double b = derived_quantities(p1, r).beta;
    CHECK(b > prev);
    prev = b;
  }
}
