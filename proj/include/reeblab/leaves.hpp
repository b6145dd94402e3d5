#pragma once

#include <functional>
#include <vector>

#include "reeblab/numerics.hpp"
#include "reeblab/profiles.hpp"

namespace reeblab {

// Trajectory of the radial leaf ODE r'(s) = g1'(r) / (mu(r) h(r)) together
// with a(s) = int_0^s g1(r(s')) ds' and the fitted decay data.
struct LeafProfile {
  std::vector<double> s_grid;   // uniform, spacing step
  std::vector<double> r_of_s;   // strictly decreasing
  std::vector<double> a_of_s;   // strictly increasing
  double step = 0.0;
  double kappa = 0.0;      // axis curvature ratio of the generating profile
  double kappa_hat = 0.0;  // fitted tail exponent of r(s)
  double c_inf = 0.0;      // tail limit of c(s) = r(s) e^{-kappa s}
};

// Half-cylinder parametrization u(s, t) = (t, r(s) e^{i alpha}) of a page
// near the binding, with the symplectization coordinate a(s).
struct GirouxLeaf {
  double alpha = 0.0;  // page angle in [0, 2pi)
  const LeafProfile* profile = nullptr;

  // chart coordinates (theta, r, phi) at (s, t); s is clamped to the grid
  double theta_at(double t) const { return wrap_angle(t); }
  double r_at(double s) const;
  double a_at(double s) const;
};

// Interpolation function h(r) used by the admissible complex structure:
// 1 / (r g1(r)) for r <= r_small, identically 1 for r >= 1 - eps0, and a
// C^2 quintic Hermite blend in between.
struct StructureConfig {
  double r_small = 0.1;
  double eps0 = 0.1;
};

double structure_h(const BindingProfile& p, double r, int deriv = 0,
                   const StructureConfig& cfg = {});

// J in the contact frame {eta1, eta2} = {d/dr, -g2 d/dtheta + g1 d/dphi}:
// J eta1 = h eta2, J eta2 = -(1/h) eta1.
Mat2 admissible_J(const BindingProfile& p, double r, const StructureConfig& cfg = {});

// Integrates the leaf ODE from r0 over [0, s_span] with fixed-step RK4;
// stops early if r underflows 1e-12. a(s) accumulates by composite Simpson.
LeafProfile solve_radial_profile(const BindingProfile& p, double r0, double s_span,
                                 double step = 1e-3, const StructureConfig& cfg = {});

// Max-norm ODE defect |r'(s) - g1'/(mu h)| with r'(s) recovered from the
// stored samples by 4th-order finite differences.
double holomorphy_residual(const LeafProfile& leaf, const BindingProfile& p,
                           const StructureConfig& cfg = {});
// Same check through a parametrized leaf; rejects a leaf solved for a
// different profile.
double holomorphy_residual(const GirouxLeaf& leaf, const BindingProfile& p,
                           const StructureConfig& cfg = {});

// Least-squares slope of log r(s) over the last quartile of the grid.
double decay_exponent_fit(const LeafProfile& leaf);

// Frame-matrix data along the leaf at parameter s:
//   pi_matrix:   pi_lambda T v0(s, .) = diag(r'(s), g1'(r)/mu(r))
//   flow_matrix: T phi_tau = [[1, 0], [tau A(r), 1]]
//   j_tau:       j0 + tau A r g1 [[-1, 0], [tau A r g1, 1]]
//   j_diff:      j_tau - j_sigma
//   coeff:       A(r) r g1^2(r) / rho with rho = e^{-s}; its log-log slope
//                against rho over the tail is -2 kappa - 1.
struct AppendixFrames {
  Mat2 pi_matrix;
  Mat2 flow_matrix;
  Mat2 j_tau;
  Mat2 j_diff;
  double coeff = 0.0;
};

AppendixFrames appendix_frames(const BindingProfile& p, double tau, double sigma, double s,
                               const LeafProfile& leaf);

// Fitted log-log slope of the coefficient against rho = e^{-s} over the
// tail window [s_lo_frac, s_hi_frac] of the solved leaf.
double appendix_coefficient_exponent(const BindingProfile& p, const LeafProfile& leaf,
                                     double s_lo_frac = 0.5, double s_hi_frac = 0.95);

// ---------------------------------------------------------------------------
// energy

using TestFunction = std::function<double(double)>;  // nondecreasing into [0,1]

struct EnergyTerms {
  double dlambda_term = 0.0;  // int phi(a) u* dlambda
  double a_term = 0.0;        // int phi'(a) da ^ u* lambda
  double total() const { return dlambda_term + a_term; }
};

EnergyTerms energy_terms(const LeafProfile& leaf, const BindingProfile& p,
                         const TestFunction& phi);

// Lower bound for the energy: max of energy_terms over the supplied family.
// Throws if a family member fails the monotone-[0,1] sample check.
double energy_estimate(const LeafProfile& leaf, const BindingProfile& p,
                       const std::vector<TestFunction>& phi_family);
double energy_estimate(const GirouxLeaf& leaf, const BindingProfile& p,
                       const std::vector<TestFunction>& phi_family);

// Smoothed-step family at n thresholds spanning the a-range of the leaf.
std::vector<TestFunction> default_energy_family(const LeafProfile& leaf, int n = 8);

}  // namespace reeblab
