#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reeblab/numerics.hpp"

namespace reeblab {

// A rotationally symmetric 1-form g1(r) dtheta + g2(r) dphi on S^1 x D,
// represented either by one of the two closed-form families or by a spline.
//
// Closed forms:
//   example1: g1 = T (1 - r^2),  g2 = r^2 (1 - r^2) / k
//   example2: g1 = T (1 - r^2),  g2 = r^2 / k            (irrational ellipsoid)
//
// Spline profiles interpolate knots (r, g1, g1', g2, g2') with quintic
// Hermite segments; the first segment is a cubic in r^2 so that evenness at
// the axis is structural and g2 / r^2 stays smooth.
enum class ProfileKind { example1, example2, spline };

struct SplineKnot {
  double r = 0.0;
  double g1 = 0.0, dg1 = 0.0;
  double g2 = 0.0, dg2 = 0.0;
};

class BindingProfile {
 public:
  ProfileKind kind = ProfileKind::example1;
  double T = 1.0;
  double k = 1.0;
  double delta = 0.0;  // outer slope parameter for designed curves
  double r_max = 1.0;
  std::vector<SplineKnot> knots;  // spline kind only, sorted by r, knots[0].r == 0

  // gamma1 / gamma2 and derivatives up to order 3 at r in [0, r_max].
  double gamma1(double r, int deriv = 0) const;
  double gamma2(double r, int deriv = 0) const;

  // kappa = g1''(0) / g2''(0), the axis curvature ratio.
  double kappa() const;

  void check_radius(double r) const;
  void rebuild_spline();  // recompute segment coefficients from knots

 private:
  struct Segment {
    double r0 = 0.0, r1 = 0.0;
    bool in_r2 = false;  // first segment: polynomial in x = r^2 (cubic)
    std::array<double, 6> c1{}, c2{};
  };
  std::vector<Segment> segs_;
  double eval_spline(double r, int deriv, bool second) const;
};

// mu, alpha, beta, A at a radius, with the r -> 0 limits filled in at the axis.
//   mu    = g1 g2' - g1' g2
//   alpha = g2' / mu   (theta speed of the Reeb field)
//   beta  = -g1' / mu  (phi speed)
//   A     = (g2'' g1' - g1'' g2') / mu^2
struct DerivedQuantities {
  double r = 0.0;
  double mu = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double bigA = 0.0;
  double kappa = 0.0;
};

BindingProfile make_example_profile(ProfileKind kind, double T, double k);
DerivedQuantities derived_quantities(const BindingProfile& p, double r);

// One entry per local-model condition.
struct ConditionReport {
  int index = 0;  // 1..6
  std::string name;
  bool pass = false;
  double margin = 0.0;  // signed; positive means satisfied with room
  double arg_r = 0.0;   // radius realizing the worst margin, when meaningful
};

struct ValidationReport {
  std::vector<ConditionReport> conditions;  // exactly six
  std::vector<double> sample_grid;
  bool pass = false;
};

// Checks the six local-model conditions on a geometric grid clustered at the
// axis (3/4 log-spaced in [1e-6, 1e-1], rest uniform up to r_max).
ValidationReport validate_local_model(const BindingProfile& p, int n_samples);

// Builds a spline profile with the prescribed axis jet (g1(0), kappa), the
// exact tail g1 = -delta r, g2 = 1 on [1 - eps0, 1], and mu > 0, g1' < 0 in
// between. Throws if the slope-mass balance cannot be made feasible within
// the retry budget.
BindingProfile design_interpolation_curve(double delta, double eps0, double gamma1_at_0,
                                          double kappa_target);

}  // namespace reeblab
