#pragma once

#include <string>
#include <vector>

#include "reeblab/numerics.hpp"
#include "reeblab/profiles.hpp"

namespace reeblab {

struct ChartPoint {
  double theta = 0.0;  // [0, 2pi)
  double r = 0.0;
  double phi = 0.0;  // [0, 2pi)

  ChartPoint normalized() const { return {wrap_angle(theta), r, wrap_angle(phi)}; }
};

// Tangent vector in the coordinate frame (d/dtheta, d/dr, d/dphi).
struct Tangent3 {
  double v_theta = 0.0, v_r = 0.0, v_phi = 0.0;
};

struct OrbitReport {
  double period = 0.0;          // 2 pi g1(0)
  bool nondegenerate = false;   // g1(0) beta(0) = -kappa not an integer
  bool elliptic = false;
  double floquet_angle = 0.0;   // beta(0) * period mod 2pi
};

enum class FlowMethod { closed_form, rk4 };

// Reeb field X = alpha(r) d/dtheta + beta(r) d/dphi.
Tangent3 reeb_field(const BindingProfile& p, const ChartPoint& pt);

// Reeb flow for time t. The closed form rotates both angles at the radius-
// frozen speeds; rk4 integrates the field with fixed step h.
ChartPoint flow(const BindingProfile& p, const ChartPoint& pt, double t, FlowMethod method,
                double rk4_step_size = 1e-3);

// Linearization of the flow along the binding orbit in (theta, x, y):
// identity in theta, rotation by beta(0) t in the disk block.
Mat3 linearized_flow(const BindingProfile& p, double t);

OrbitReport binding_orbit_report(const BindingProfile& p);

// First time the phi coordinate advances by 2 pi: 2 pi / |beta(r)|.
// Throws if beta(r) vanishes (no finite phi-return).
double return_time(const BindingProfile& p, double r);

// Same quantity located by rk4 flow integration with bisection on the
// phi-advance event (cross-check oracle).
double return_time_by_flow(const BindingProfile& p, double r, double tol = 1e-9);

// ---------------------------------------------------------------------------
// contact / confoliation classification of a sampled 1-form

// One chart node carrying the form components a dtheta + b dr + c dphi and
// their coordinate derivatives (rows: d/dtheta, d/dr, d/dphi).
struct FormNode {
  double theta = 0.0, r = 0.0, phi = 0.0;  // r > 0
  double a = 0.0, b = 0.0, c = 0.0;
  double da[3] = {0, 0, 0};
  double db[3] = {0, 0, 0};
  double dc[3] = {0, 0, 0};
};

struct FormSamples {
  std::vector<FormNode> nodes;
};

enum class FormClass { contact, confoliation, neither };

struct ContactReport {
  FormClass cls = FormClass::neither;
  double min_density = 0.0;  // min of (lambda ^ dlambda) / (r dtheta dx dy)
  double max_density = 0.0;
  FormNode argmin;
};

// Evaluates the wedge density against the Euclidean volume dtheta dx dy
// (i.e. the polar coefficient divided by r) and classifies:
// contact if min > tol, confoliation if min >= -tol, else neither,
// with tol = 1e-10 * max |density|.
ContactReport contact_check(const FormSamples& samples);

// Samples the rotationally symmetric form of a profile on a regular
// (theta, r, phi) grid with exact derivatives.
FormSamples sample_profile_form(const BindingProfile& p, int n_theta, int n_r, int n_phi,
                                double r_lo, double r_hi);

// ---------------------------------------------------------------------------
// Thurston-Winkelnkemper threshold

// Per-node scalars of the mapping-torus part:
//   a = (alpha~ ^ dalpha~)(u, v, w),  b = dtau(pi_* w) dalpha~(u, v) > 0.
struct PageSample {
  std::vector<double> a;
  std::vector<double> b;
};

// Largest delta for which -delta alpha~ + pi* dtau is contact on the samples:
// min over nodes of b/|a|, +infinity when a vanishes identically.
double tw_contact_threshold(const PageSample& page);

}  // namespace reeblab
