#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reeblab/contact.hpp"

using namespace reeblab;

TEST_CASE("Reeb field values and defining identities") {
  const auto p2 = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  const auto v = reeb_field(p2, {0.0, 0.3, 0.0});
  CHECK(v.v_theta == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(v.v_r == 0.0);
  CHECK(v.v_phi == doctest::Approx(0.7).epsilon(1e-13));

  const auto v0 = reeb_field(p2, {0.0, 0.0, 0.0});
  CHECK(v0.v_theta == doctest::Approx(1.0 / p2.gamma1(0.0)).epsilon(1e-13));

  // lambda(X) = 1 and i_X dlambda = 0 at 100 random radii
  Rng rng(11);
  const auto p1 = make_example_profile(ProfileKind::example1, 1.0, 0.7);
  for (const auto& p : {p1, p2}) {
    for (int i = 0; i < 100; ++i) {
      const double r = rng.uniform(1e-3, 0.9 * p.r_max);
      const auto q = derived_quantities(p, r);
      const double pairing = p.gamma1(r) * q.alpha + p.gamma2(r) * q.beta;
      CHECK(std::fabs(pairing - 1.0) < 1e-10);
      const double contraction = p.gamma1(r, 1) * q.alpha + p.gamma2(r, 1) * q.beta;
      CHECK(std::fabs(contraction) < 1e-10);
    }
  }
}

TEST_CASE("flow: closed form, identity at zero time, rk4 agreement") {
  const auto p = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  const ChartPoint start{0.0, 0.3, 0.0};
  const auto end = flow(p, start, kTwoPi, FlowMethod::closed_form);
  CHECK(std::min(end.theta, kTwoPi - end.theta) < 1e-12);  // full theta turn wraps to 0
  CHECK(end.r == 0.3);
  CHECK(end.phi == doctest::Approx(0.7 * kTwoPi).epsilon(1e-12));

  const auto same = flow(p, start, 0.0, FlowMethod::closed_form);
  CHECK(same.theta == start.theta);
  CHECK(same.r == start.r);
  CHECK(same.phi == start.phi);

  const auto a = flow(p, start, 10.0, FlowMethod::closed_form);
  const auto b = flow(p, start, 10.0, FlowMethod::rk4, 1e-3);
  CHECK(std::fabs(a.theta - b.theta) < 1e-9);
  CHECK(std::fabs(a.r - b.r) < 1e-9);
  CHECK(std::fabs(a.phi - b.phi) < 1e-9);
}

TEST_CASE("flow preserves lambda(X) and the radius") {
  const auto p = make_example_profile(ProfileKind::example1, 1.0, 0.7);
  const ChartPoint start{1.0, 0.4, 2.0};
  const auto end = flow(p, start, 7.3, FlowMethod::rk4, 1e-3);
  CHECK(std::fabs(end.r - start.r) < 1e-12);  // r is invariant along the flow
}

TEST_CASE("linearized flow: rotation block, determinant one, full Floquet turn") {
  const auto p = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  const auto I = linearized_flow(p, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(I[i][j] == doctest::Approx(i == j ? 1.0 : 0.0));

  const auto M = linearized_flow(p, kTwoPi / 0.7);
  CHECK(M[1][1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(M[1][2] == doctest::Approx(0.0).epsilon(1e-12));

  Rng rng(5);
  for (int i = 0; i < 50; ++i)
    CHECK(std::fabs(mat3_det(linearized_flow(p, rng.uniform(-20, 20))) - 1.0) < 1e-12);
}

TEST_CASE("linearized flow matches the finite-difference Jacobian at the axis") {
  const auto p = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  const double t = 1.3, h = 1e-4;
  const auto M = linearized_flow(p, t);
  // differentiate the flow in Cartesian disk coordinates at the binding orbit
  auto flow_xy = [&](double x, double y) {
    const double r = std::hypot(x, y);
    const double phi0 = std::atan2(y, x);
    const auto q = derived_quantities(p, r);
    const double phi1 = phi0 + q.beta * t;
    return std::pair<double, double>{r * std::cos(phi1), r * std::sin(phi1)};
  };
  const auto [xp, yp] = flow_xy(h, 0.0);
  const auto [xm, ym] = flow_xy(-h, 0.0);
  CHECK(std::fabs((xp - xm) / (2 * h) - M[1][1]) < 1e-4);
  CHECK(std::fabs((yp - ym) / (2 * h) - M[2][1]) < 1e-4);
}

TEST_CASE("binding orbit report") {
  const auto p1 = make_example_profile(ProfileKind::example1, 1.0, 0.7);
  const auto rep = binding_orbit_report(p1);
  CHECK(rep.period == doctest::Approx(kTwoPi).epsilon(1e-14));
  CHECK(rep.nondegenerate);
  CHECK(rep.elliptic);

  const auto p_half = make_example_profile(ProfileKind::example2, 1.0, 0.5);
  CHECK(binding_orbit_report(p_half).nondegenerate);  // kappa = -1/2, not an integer
}

TEST_CASE("return time: constant for the ellipsoid, flow cross-check") {
  const auto p2 = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  for (double r : {0.1, 0.4, 0.8})
    CHECK(return_time(p2, r) == doctest::Approx(kTwoPi / 0.7).epsilon(1e-13));
  CHECK(return_time(p2, 0.3) == doctest::Approx(8.9760).epsilon(1e-4));
  CHECK(std::fabs(return_time_by_flow(p2, 0.3) - kTwoPi / 0.7) < 1e-6);
}

TEST_CASE("example1 at r = 1/sqrt(2): theta speed vanishes, phi-return stays finite") {
  // the m = 0 resonance radius: orbits close up without winding in theta
  const auto p1 = make_example_profile(ProfileKind::example1, 1.0, 0.7);
  const double r = 1.0 / std::sqrt(2.0);
  const auto q = derived_quantities(p1, r);
  CHECK(std::fabs(q.alpha) < 1e-13);
  const double ref = kTwoPi * 0.25 / 0.7;  // 2 pi (1-r^2)^2 / k
  CHECK(return_time(p1, r) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(std::fabs(return_time_by_flow(p1, r) - ref) < 1e-6);
}

TEST_CASE("return time rejects vanishing phi speed") {
  // a (deliberately invalid) profile with flat gamma1 has beta = 0
  BindingProfile p;
  p.kind = ProfileKind::spline;
  p.r_max = 1.0;
  for (double r : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) p.knots.push_back({r, 1.0, 0.0, r * r, 2 * r});
  p.rebuild_spline();
  CHECK_THROWS_AS(return_time(p, 0.5), std::runtime_error);
}

TEST_CASE("small-radius tori of the ellipsoid close after |m| >= 2 theta turns") {
  // kT = 7/10: orbits close after m = 10 theta-periods, period 2 pi m T
  const auto p = make_example_profile(ProfileKind::example2, 1.0, 0.7);
  const double period = kTwoPi * 10.0;
  const ChartPoint start{0.5, 0.05, 1.5};
  const auto end = flow(p, start, period, FlowMethod::closed_form);
  CHECK(std::fabs(end.theta - start.theta) < 1e-9);
  CHECK(std::fabs(end.phi - start.phi) < 1e-9);
  // and not earlier with a single turn
  const auto once = flow(p, start, kTwoPi, FlowMethod::closed_form);
  CHECK(std::fabs(once.phi - start.phi) > 1e-3);
}

TEST_CASE("contact classification of sampled forms") {
  const auto p1 = make_example_profile(ProfileKind::example1, 1.0, 0.7);
  const auto samples = sample_profile_form(p1, 4, 24, 4, 0.02, 0.9);
  const auto rep = contact_check(samples);
  CHECK(rep.cls == FormClass::contact);
  CHECK(rep.min_density > 0.0);

  // the pure page form dphi: density identically zero
  FormSamples dphi;
  for (double r : {0.1, 0.5, 0.9}) {
    FormNode n;
    n.r = r;
    n.c = 1.0;
    dphi.nodes.push_back(n);
  }
  CHECK(contact_check(dphi).cls == FormClass::confoliation);

  // glued outer-flat family member: contact inside, zero density on the
  // mapping-torus region
  FormSamples glued;
  const double eps0 = 0.1;
  for (double r : linspace(0.05, 1.2, 60)) {
    const double w = std::min(r / (1.0 - eps0), 1.0);
    const double wp = (r < 1.0 - eps0) ? 1.0 / (1.0 - eps0) : 0.0;
    const double s = 1.0 - w * w;
    FormNode n;
    n.r = r;
    n.a = s * s * s;                      // gamma1
    n.c = 1.0 - s * s * s;                // gamma2
    n.da[1] = -3.0 * s * s * 2.0 * w * wp;
    n.dc[1] = 3.0 * s * s * 2.0 * w * wp;
    glued.nodes.push_back(n);
  }
  const auto grep = contact_check(glued);
  CHECK(grep.cls == FormClass::confoliation);
  CHECK(grep.min_density >= 0.0);
  CHECK(grep.max_density > 0.0);

  // a genuinely non-confoliation form
  FormSamples bad;
  for (double r : linspace(0.1, 0.9, 20)) {
    FormNode n;
    n.r = r;
    n.a = 1.0 + r * r;
    n.c = -r * r;
    n.da[1] = 2.0 * r;
    n.dc[1] = -2.0 * r;
    bad.nodes.push_back(n);
  }
  CHECK(contact_check(bad).cls == FormClass::neither);
}

TEST_CASE("contact threshold of a sampled page") {
  PageSample page;
  page.a = {2.0, 2.0, 2.0};
  page.b = {1.0, 1.0, 1.0};
  CHECK(tw_contact_threshold(page) == doctest::Approx(0.5));

  PageSample flat;
  flat.a = {0.0, 0.0};
  flat.b = {1.0, 2.0};
  CHECK(std::isinf(tw_contact_threshold(flat)));

  PageSample bad;
  bad.a = {1.0};
  bad.b = {-1.0};
  CHECK_THROWS_AS(tw_contact_threshold(bad), std::invalid_argument);

  // homogeneity: scaling a by c scales the threshold by 1/c
  PageSample scaled;
  Rng rng(2);
  for (int i = 0; i < 30; ++i) {
    scaled.a.push_back(rng.uniform(-3, 3));
    scaled.b.push_back(rng.uniform(0.5, 2.0));
  }
  const double base = tw_contact_threshold(scaled);
  for (auto& v : scaled.a) v *= 4.0;
  CHECK(tw_contact_threshold(scaled) == doctest::Approx(base / 4.0).epsilon(1e-12));
}
