#include "reeblab/leaves.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace reeblab {

namespace {

double interp_column(const std::vector<double>& s_grid, const std::vector<double>& col, double s) {
  if (s_grid.empty()) throw std::runtime_error("leaf profile is empty");
  if (s <= s_grid.front()) return col.front();
  if (s >= s_grid.back()) return col.back();
  const auto it = std::upper_bound(s_grid.begin(), s_grid.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - s_grid.begin()) - 1;
  const double w = (s - s_grid[i]) / (s_grid[i + 1] - s_grid[i]);
  return (1.0 - w) * col[i] + w * col[i + 1];
}

// rhs of the leaf ODE, r' = g1'(r) / (mu(r) h(r))
double leaf_rhs(const BindingProfile& p, double r, const StructureConfig& cfg) {
  const double g1 = p.gamma1(r), dg1 = p.gamma1(r, 1);
  const double mu = g1 * p.gamma2(r, 1) - dg1 * p.gamma2(r);
  return dg1 / (mu * structure_h(p, r, 0, cfg));
}

}  // namespace

double GirouxLeaf::r_at(double s) const {
  if (!profile) throw std::runtime_error("GirouxLeaf: no profile attached");
  return interp_column(profile->s_grid, profile->r_of_s, s);
}

double GirouxLeaf::a_at(double s) const {
  if (!profile) throw std::runtime_error("GirouxLeaf: no profile attached");
  return interp_column(profile->s_grid, profile->a_of_s, s);
}

// h = 1/(r g1) below r_small and 1 beyond 1 - eps0. The blend interpolates
// the denominator g = r g1(r) toward 1 with a quintic Hermite (mild
// derivative data, stays positive) and returns h = 1/g.
double structure_h(const BindingProfile& p, double r, int deriv, const StructureConfig& cfg) {
  if (!(r > 0.0))
    throw std::invalid_argument("structure_h: r must be positive (frame degenerates at the axis)");
  const double r_right = 1.0 - cfg.eps0;
  auto recip = [](double f, double df, double ddf, int d) {
    if (d == 0) return 1.0 / f;
    if (d == 1) return -df / (f * f);
    return (2.0 * df * df - f * ddf) / (f * f * f);
  };
  if (r <= cfg.r_small) {
    const double g = p.gamma1(r), dg = p.gamma1(r, 1);
    return recip(r * g, g + r * dg, 2.0 * dg + r * p.gamma1(r, 2), deriv);
  }
  if (r >= r_right) return deriv == 0 ? 1.0 : 0.0;
  const double rs = cfg.r_small;
  const double g0 = rs * p.gamma1(rs);
  const double dg0 = p.gamma1(rs) + rs * p.gamma1(rs, 1);
  const double ddg0 = 2.0 * p.gamma1(rs, 1) + rs * p.gamma1(rs, 2);
  const double w = r_right - rs;
  const Quintic q = Quintic::hermite(g0, dg0, ddg0, 1.0, 0.0, 0.0, w);
  const double u = (r - rs) / w;
  const double f = q.eval(u, 0, w);
  if (!(f > 0.0)) throw std::runtime_error("structure_h: denominator blend lost positivity");
  return recip(f, q.eval(u, 1, w), q.eval(u, 2, w), deriv);
}

Mat2 admissible_J(const BindingProfile& p, double r, const StructureConfig& cfg) {
  const double h = structure_h(p, r, 0, cfg);
  if (!(h > 0.0)) throw std::runtime_error("admissible_J: h(r) must be positive");
  return {0.0, -1.0 / h, h, 0.0};
}

LeafProfile solve_radial_profile(const BindingProfile& p, double r0, double s_span, double step,
                                 const StructureConfig& cfg) {
  if (!(r0 > 0.0) || r0 >= p.r_max)
    throw std::invalid_argument("solve_radial_profile: need 0 < r0 < r_max");
  if (!(s_span > 0.0) || !(step > 0.0))
    throw std::invalid_argument("solve_radial_profile: s_span and step must be positive");

  LeafProfile lp;
  lp.step = step;
  lp.kappa = p.kappa();
  OdeRhs<1> rhs = [&](const std::array<double, 1>& y) -> std::array<double, 1> {
    return {leaf_rhs(p, y[0], cfg)};
  };
  const std::size_t n_steps = static_cast<std::size_t>(std::llround(s_span / step));
  lp.s_grid.reserve(n_steps + 1);
  lp.r_of_s.reserve(n_steps + 1);
  std::array<double, 1> y{r0};
  lp.s_grid.push_back(0.0);
  lp.r_of_s.push_back(r0);
  for (std::size_t i = 1; i <= n_steps; ++i) {
    y = rk4_step<1>(rhs, y, step);
    if (!(y[0] > 1e-12)) break;  // tail below machine resolution
    lp.s_grid.push_back(step * static_cast<double>(i));
    lp.r_of_s.push_back(y[0]);
  }
  if (lp.s_grid.size() < 8) throw std::runtime_error("solve_radial_profile: trajectory underflow");

  std::vector<double> g1_vals(lp.r_of_s.size());
  for (std::size_t i = 0; i < lp.r_of_s.size(); ++i) g1_vals[i] = p.gamma1(lp.r_of_s[i]);
  lp.a_of_s = cumulative_simpson(g1_vals, step);

  lp.kappa_hat = decay_exponent_fit(lp);
  const std::size_t q0 = (3 * lp.s_grid.size()) / 4;
  double c_acc = 0.0;
  for (std::size_t i = q0; i < lp.s_grid.size(); ++i)
    c_acc += lp.r_of_s[i] * std::exp(-lp.kappa * lp.s_grid[i]);
  lp.c_inf = c_acc / static_cast<double>(lp.s_grid.size() - q0);
  return lp;
}

double holomorphy_residual(const LeafProfile& leaf, const BindingProfile& p,
                           const StructureConfig& cfg) {
  const auto& r = leaf.r_of_s;
  const std::size_t n = r.size();
  if (n < 5) throw std::invalid_argument("holomorphy_residual: need >= 5 samples");
  const double h = leaf.step;
  auto deriv = [&](std::size_t i) {
    if (i >= 2 && i + 2 < n)
      return (-r[i + 2] + 8.0 * r[i + 1] - 8.0 * r[i - 1] + r[i - 2]) / (12.0 * h);
    if (i == 0)
      return (-25.0 * r[0] + 48.0 * r[1] - 36.0 * r[2] + 16.0 * r[3] - 3.0 * r[4]) / (12.0 * h);
    if (i == 1)
      return (-3.0 * r[0] - 10.0 * r[1] + 18.0 * r[2] - 6.0 * r[3] + r[4]) / (12.0 * h);
    if (i == n - 2)
      return (3.0 * r[n - 1] + 10.0 * r[n - 2] - 18.0 * r[n - 3] + 6.0 * r[n - 4] - r[n - 5]) /
             (12.0 * h);
    return (25.0 * r[n - 1] - 48.0 * r[n - 2] + 36.0 * r[n - 3] - 16.0 * r[n - 4] +
            3.0 * r[n - 5]) /
           (12.0 * h);
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    worst = std::max(worst, std::fabs(deriv(i) - leaf_rhs(p, r[i], cfg)));
  return worst;
}

double holomorphy_residual(const GirouxLeaf& leaf, const BindingProfile& p,
                           const StructureConfig& cfg) {
  if (!leaf.profile) throw std::invalid_argument("holomorphy_residual: leaf has no profile");
  if (std::fabs(leaf.profile->kappa - p.kappa()) > 1e-9)
    throw std::invalid_argument("holomorphy_residual: leaf was solved for a different profile");
  return holomorphy_residual(*leaf.profile, p, cfg);
}

double decay_exponent_fit(const LeafProfile& leaf) {
  const std::size_t n = leaf.r_of_s.size();
  const std::size_t q0 = (3 * n) / 4;
  if (n - q0 < 16) throw std::invalid_argument("decay_exponent_fit: need >= 16 tail samples");
  std::vector<double> xs, ys;
  for (std::size_t i = q0; i < n; ++i) {
    if (!(leaf.r_of_s[i] > 0.0)) throw std::invalid_argument("decay_exponent_fit: nonpositive r");
    xs.push_back(leaf.s_grid[i]);
    ys.push_back(std::log(leaf.r_of_s[i]));
  }
  return fit_line(xs, ys).slope;
}

AppendixFrames appendix_frames(const BindingProfile& p, double tau, double sigma, double s,
                               const LeafProfile& leaf) {
  const double r = interp_column(leaf.s_grid, leaf.r_of_s, s);
  if (!(r > 1e-300)) throw std::runtime_error("appendix_frames: r(s) below machine threshold");
  const auto q = derived_quantities(p, r);
  const double g1 = p.gamma1(r), dg1 = p.gamma1(r, 1);
  AppendixFrames out;
  out.pi_matrix = {leaf_rhs(p, r, {}), 0.0, 0.0, dg1 / q.mu};
  out.flow_matrix = {1.0, 0.0, tau * q.bigA, 1.0};
  const double at = tau * q.bigA * r * g1;
  out.j_tau = {-at, -1.0, 1.0 + at * at, at};
  const double base = q.bigA * r * g1 * (tau - sigma);
  out.j_diff = {-base, 0.0, base * (tau + sigma) * q.bigA * r * g1, base};
  out.coeff = q.bigA * r * g1 * g1 * std::exp(s);
  return out;
}

double appendix_coefficient_exponent(const BindingProfile& p, const LeafProfile& leaf,
                                     double s_lo_frac, double s_hi_frac) {
  const double s_max = leaf.s_grid.back();
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < leaf.s_grid.size(); ++i) {
    const double s = leaf.s_grid[i];
    if (s < s_lo_frac * s_max || s > s_hi_frac * s_max) continue;
    const double r = leaf.r_of_s[i];
    const double c = derived_quantities(p, r).bigA * r * p.gamma1(r) * p.gamma1(r) * std::exp(s);
    if (!(std::fabs(c) > 1e-280)) continue;
    xs.push_back(-s);  // log rho
    ys.push_back(std::log(std::fabs(c)));
  }
  if (xs.size() < 8)
    throw std::runtime_error("appendix_coefficient_exponent: coefficient vanishes on the window");
  return fit_line(xs, ys).slope;
}

EnergyTerms energy_terms(const LeafProfile& leaf, const BindingProfile& p,
                         const TestFunction& phi) {
  const std::size_t n = leaf.s_grid.size();
  EnergyTerms out;
  if (n < 3) return out;
  const double h = leaf.step;
  const double fd = 1e-6 * std::max(1.0, std::fabs(leaf.a_of_s.back()));
  // slopes from the stored trajectory so that degenerate (constant or
  // truncated) leaves integrate to exactly what they carry
  auto slope = [&](const std::vector<double>& v, std::size_t i) {
    if (i == 0) return (v[1] - v[0]) / h;
    if (i + 1 == n) return (v[n - 1] - v[n - 2]) / h;
    return (v[i + 1] - v[i - 1]) / (2.0 * h);
  };
  std::vector<double> f_dl(n), f_a(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = leaf.r_of_s[i];
    const double a = leaf.a_of_s[i];
    const double dphi = (phi(a + fd) - phi(a - fd)) / (2.0 * fd);
    f_dl[i] = phi(a) * p.gamma1(r, 1) * slope(leaf.r_of_s, i);  // phi(a) u* dlambda
    f_a[i] = dphi * slope(leaf.a_of_s, i) * p.gamma1(r);        // phi'(a) da ^ u* lambda
  }
  out.dlambda_term = kTwoPi * cumulative_simpson(f_dl, h).back();
  out.a_term = kTwoPi * cumulative_simpson(f_a, h).back();
  return out;
}

double energy_estimate(const LeafProfile& leaf, const BindingProfile& p,
                       const std::vector<TestFunction>& phi_family) {
  if (phi_family.empty()) throw std::invalid_argument("energy_estimate: empty test family");
  const double a_lo = leaf.a_of_s.front() - 1.0, a_hi = leaf.a_of_s.back() + 1.0;
  for (const auto& phi : phi_family) {
    double prev = phi(a_lo);
    for (double x : linspace(a_lo, a_hi, 64)) {
      const double v = phi(x);
      if (v < prev - 1e-12 || v < -1e-12 || v > 1.0 + 1e-12)
        throw std::invalid_argument("energy_estimate: test function must be nondecreasing into [0,1]");
      prev = v;
    }
  }
  double best = 0.0;
  for (const auto& phi : phi_family) best = std::max(best, energy_terms(leaf, p, phi).total());
  return best;
}

double energy_estimate(const GirouxLeaf& leaf, const BindingProfile& p,
                       const std::vector<TestFunction>& phi_family) {
  if (!leaf.profile) throw std::invalid_argument("energy_estimate: leaf has no profile");
  return energy_estimate(*leaf.profile, p, phi_family);
}

std::vector<TestFunction> default_energy_family(const LeafProfile& leaf, int n) {
  const double a0 = leaf.a_of_s.front(), a1 = leaf.a_of_s.back();
  const double w = std::max((a1 - a0) / 16.0, 1e-12);
  std::vector<TestFunction> fam;
  for (int i = 0; i < n; ++i) {
    const double c = a0 + (a1 - a0) * (i + 0.5) / n;
    fam.push_back([c, w](double x) { return smoothstep7((x - (c - 0.5 * w)) / w); });
  }
  return fam;
}

}  // namespace reeblab
