#include "reeblab/contact.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace reeblab {

Tangent3 reeb_field(const BindingProfile& p, const ChartPoint& pt) {
  const auto q = derived_quantities(p, pt.r);
  return {q.alpha, 0.0, q.beta};
}

ChartPoint flow(const BindingProfile& p, const ChartPoint& pt, double t, FlowMethod method,
                double rk4_step_size) {
  p.check_radius(pt.r);
  if (method == FlowMethod::closed_form) {
    const auto q = derived_quantities(p, pt.r);
    ChartPoint out{pt.theta + q.alpha * t, pt.r, pt.phi + q.beta * t};
    return out.normalized();
  }
  if (!(rk4_step_size > 0.0)) throw std::invalid_argument("flow: rk4 step must be positive");
  OdeRhs<3> rhs = [&p](const std::array<double, 3>& y) -> std::array<double, 3> {
    const auto q = derived_quantities(p, y[1]);
    return {q.alpha, 0.0, q.beta};
  };
  std::array<double, 3> y{pt.theta, pt.r, pt.phi};
  double remaining = t;
  const double dir = (t >= 0.0) ? 1.0 : -1.0;
  while (std::fabs(remaining) > 0.0) {
    const double h = dir * std::min(rk4_step_size, std::fabs(remaining));
    y = rk4_step<3>(rhs, y, h);
    y[0] = wrap_angle(y[0]);
    y[2] = wrap_angle(y[2]);
    remaining -= h;
    if (std::fabs(remaining) < 1e-15) break;
  }
  return ChartPoint{y[0], y[1], y[2]}.normalized();
}

Mat3 linearized_flow(const BindingProfile& p, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("linearized_flow: t must be finite");
  const double b0 = derived_quantities(p, 0.0).beta;
  Mat3 M = mat3_identity();
  M[1][1] = std::cos(b0 * t);
  M[1][2] = -std::sin(b0 * t);
  M[2][1] = std::sin(b0 * t);
  M[2][2] = std::cos(b0 * t);
  return M;
}

OrbitReport binding_orbit_report(const BindingProfile& p) {
  OrbitReport rep;
  const double g10 = p.gamma1(0.0);
  const double b0 = derived_quantities(p, 0.0).beta;
  rep.period = kTwoPi * g10;
  // g1(0) beta(0) = -kappa; the orbit is nondegenerate iff this is not an integer
  rep.nondegenerate = angle_dist_to_int(g10 * b0) > 1e-12;
  rep.elliptic = rep.nondegenerate;  // rotation-block Floquet multipliers e^{+-i beta(0) t}
  rep.floquet_angle = wrap_angle(b0 * rep.period);
  return rep;
}

double return_time(const BindingProfile& p, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("return_time: r must be positive");
  p.check_radius(r);
  const double beta = derived_quantities(p, r).beta;
  if (std::fabs(beta) < 1e-12)
    throw std::runtime_error("return_time: beta(r) vanishes, no finite phi-return");
  return kTwoPi / std::fabs(beta);
}

double return_time_by_flow(const BindingProfile& p, double r, double tol) {
  if (!(r > 0.0)) throw std::invalid_argument("return_time_by_flow: r must be positive");
  const double beta = derived_quantities(p, r).beta;
  if (std::fabs(beta) < 1e-12)
    throw std::runtime_error("return_time_by_flow: beta(r) vanishes");
  // track the unwrapped phi advance along rk4 steps; bisect the 2pi crossing
  OdeRhs<3> rhs = [&p](const std::array<double, 3>& y) -> std::array<double, 3> {
    const auto q = derived_quantities(p, y[1]);
    return {q.alpha, 0.0, q.beta};
  };
  const double dir = beta > 0.0 ? 1.0 : -1.0;
  const double h = 1e-3;
  std::array<double, 3> y{0.0, r, 0.0};
  double t = 0.0, adv_prev = 0.0;
  std::array<double, 3> y_prev = y;
  for (int step = 0; step < 100000000; ++step) {
    y_prev = y;
    y = rk4_step<3>(rhs, y, h);
    t += h;
    const double adv = adv_prev + (y[2] - y_prev[2]) * dir;
    if (adv >= kTwoPi) {
      double lo = t - h, hi = t;
      double adv_lo = adv_prev;
      std::array<double, 3> ylo = y_prev;
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        auto ym = rk4_step<3>(rhs, ylo, mid - lo);
        const double adv_mid = adv_lo + (ym[2] - ylo[2]) * dir;
        if (adv_mid >= kTwoPi) {
          hi = mid;
        } else {
          ylo = ym;
          adv_lo = adv_mid;
          lo = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    adv_prev = adv;
  }
  throw std::runtime_error("return_time_by_flow: no return within step budget");
}

ContactReport contact_check(const FormSamples& samples) {
  if (samples.nodes.empty()) throw std::invalid_argument("contact_check: empty sample grid");
  ContactReport rep;
  rep.min_density = std::numeric_limits<double>::infinity();
  rep.max_density = -std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
  for (const auto& n : samples.nodes) {
    if (!(n.r > 0.0)) throw std::invalid_argument("contact_check: nodes must have r > 0");
    // (lambda ^ dlambda) = [a (dc/dr - db/dphi) + b (da/dphi - dc/dtheta)
    //                       + c (db/dtheta - da/dr)] dtheta ^ dr ^ dphi
    const double coef = n.a * (n.dc[1] - n.db[2]) + n.b * (n.da[2] - n.dc[0]) +
                        n.c * (n.db[0] - n.da[1]);
    const double density = coef / n.r;  // against dtheta dx dy
    if (density < rep.min_density) {
      rep.min_density = density;
      rep.argmin = n;
    }
    rep.max_density = std::max(rep.max_density, density);
    max_abs = std::max(max_abs, std::fabs(density));
  }
  const double tol = 1e-10 * std::max(max_abs, 1.0e-300);
  if (rep.min_density > tol)
    rep.cls = FormClass::contact;
  else if (rep.min_density >= -tol)
    rep.cls = FormClass::confoliation;
  else
    rep.cls = FormClass::neither;
  return rep;
}

FormSamples sample_profile_form(const BindingProfile& p, int n_theta, int n_r, int n_phi,
                                double r_lo, double r_hi) {
  if (n_theta < 1 || n_r < 2 || n_phi < 1)
    throw std::invalid_argument("sample_profile_form: bad grid dimensions");
  if (!(r_lo > 0.0) || !(r_hi > r_lo)) throw std::invalid_argument("sample_profile_form: bad radii");
  FormSamples s;
  for (int it = 0; it < n_theta; ++it)
    for (int ir = 0; ir < n_r; ++ir)
      for (int ip = 0; ip < n_phi; ++ip) {
        FormNode n;
        n.theta = kTwoPi * it / n_theta;
        n.r = r_lo + (r_hi - r_lo) * ir / (n_r - 1);
        n.phi = kTwoPi * ip / n_phi;
        n.a = p.gamma1(n.r);
        n.c = p.gamma2(n.r);
        n.da[1] = p.gamma1(n.r, 1);
        n.dc[1] = p.gamma2(n.r, 1);
        s.nodes.push_back(n);
      }
  return s;
}

double tw_contact_threshold(const PageSample& page) {
  if (page.a.size() != page.b.size() || page.a.empty())
    throw std::invalid_argument("tw_contact_threshold: malformed page sample");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < page.a.size(); ++i) {
    if (!(page.b[i] > 0.0))
      throw std::invalid_argument("tw_contact_threshold: dalpha~ must be a fiber area form (b > 0)");
    if (page.a[i] != 0.0) best = std::min(best, page.b[i] / std::fabs(page.a[i]));
  }
  return best;
}

}  // namespace reeblab
