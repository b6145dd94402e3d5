#include "reeblab/beltrami.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace reeblab {

namespace {

// frequency of bin j on an n-point grid of period 2L: k = pi/L * m
double bin_wavenumber(std::size_t j, std::size_t n, double L) {
  const long m = static_cast<long>(j < n / 2 ? j : j - n);
  return kPi / L * static_cast<double>(m);
}

enum class MultiplierKind { inv_dbar, dbar, dz, beurling };

GridField apply_multiplier(const GridField& g, MultiplierKind kind) {
  const std::size_t n = g.n();
  const double L = g.extent();
  std::vector<cplx> a = g.raw();
  fft2_inplace(a, n, -1);
  for (std::size_t jy = 0; jy < n; ++jy) {
    const double ky = bin_wavenumber(jy, n, L);
    for (std::size_t jx = 0; jx < n; ++jx) {
      const double kx = bin_wavenumber(jx, n, L);
      const cplx w(kx, ky);
      cplx m(0.0, 0.0);
      switch (kind) {
        case MultiplierKind::dbar:
          m = 0.5 * cplx(0.0, 1.0) * w;  // (i kx - ky)/2 = i w / 2
          break;
        case MultiplierKind::dz:
          m = 0.5 * cplx(0.0, 1.0) * std::conj(w);  // (i kx + ky)/2 = i conj(w)/2
          break;
        case MultiplierKind::inv_dbar:
          m = (jx == 0 && jy == 0) ? cplx(0.0, 0.0) : 2.0 / (cplx(0.0, 1.0) * w);
          break;
        case MultiplierKind::beurling:
          m = (jx == 0 && jy == 0) ? cplx(0.0, 0.0) : std::conj(w) / w;
          break;
      }
      a[jy * n + jx] *= m;
    }
  }
  fft2_inplace(a, n, +1);
  GridField out(n, L);
  out.raw() = std::move(a);
  return out;
}

}  // namespace

cplx mean_mode(const GridField& g) {
  cplx s(0.0, 0.0);
  for (const auto& z : g.raw()) s += z;
  return s / static_cast<double>(g.raw().size());
}

GridField::GridField(std::size_t n, double extent, cplx fill) : n_(n), extent_(extent) {
  if (!is_power_of_two(n)) throw std::invalid_argument("GridField: n must be a power of two");
  if (!(extent > 0.0)) throw std::invalid_argument("GridField: extent must be positive");
  v_.assign(n * n, fill);
}

double GridField::coord(std::size_t i) const {
  return -extent_ + 2.0 * extent_ * static_cast<double>(i) / static_cast<double>(n_);
}

cplx GridField::sample(cplx z, bool bil) const {
  const double h = spacing();
  const double fx = (z.real() + extent_) / h;
  const double fy = (z.imag() + extent_) / h;
  auto wrap = [&](long i) {
    long m = i % static_cast<long>(n_);
    if (m < 0) m += static_cast<long>(n_);
    return static_cast<std::size_t>(m);
  };
  if (!bil) return v_[wrap(std::lround(fy)) * n_ + wrap(std::lround(fx))];
  const long ix = static_cast<long>(std::floor(fx)), iy = static_cast<long>(std::floor(fy));
  const double wx = fx - static_cast<double>(ix), wy = fy - static_cast<double>(iy);
  const cplx v00 = v_[wrap(iy) * n_ + wrap(ix)], v01 = v_[wrap(iy) * n_ + wrap(ix + 1)];
  const cplx v10 = v_[wrap(iy + 1) * n_ + wrap(ix)], v11 = v_[wrap(iy + 1) * n_ + wrap(ix + 1)];
  return (1 - wy) * ((1 - wx) * v00 + wx * v01) + wy * ((1 - wx) * v10 + wx * v11);
}

double GridField::norm_l2() const {
  double s = 0.0;
  for (const auto& z : v_) s += std::norm(z);
  const double h = spacing();
  return std::sqrt(s * h * h);
}

double GridField::norm_lp(double p) const {
  double s = 0.0;
  for (const auto& z : v_) s += std::pow(std::abs(z), p);
  const double h = spacing();
  return std::pow(s * h * h, 1.0 / p);
}

double GridField::norm_sup() const {
  double s = 0.0;
  for (const auto& z : v_) s = std::max(s, std::abs(z));
  return s;
}

GridField GridField::from_function(std::size_t n, double extent,
                                   const std::function<cplx(cplx)>& f) {
  GridField g(n, extent);
  for (std::size_t iy = 0; iy < n; ++iy)
    for (std::size_t ix = 0; ix < n; ++ix) g.at(ix, iy) = f(g.point(ix, iy));
  return g;
}

GridField d_bar(const GridField& g) { return apply_multiplier(g, MultiplierKind::dbar); }
GridField d_z(const GridField& g) { return apply_multiplier(g, MultiplierKind::dz); }

GridField cauchy_transform(const GridField& g, double* tail_mass) {
  if (tail_mass) {
    double outside = 0.0, total = 0.0;
    for (std::size_t iy = 0; iy < g.n(); ++iy)
      for (std::size_t ix = 0; ix < g.n(); ++ix) {
        const double m = std::norm(g.at(ix, iy));
        total += m;
        if (std::abs(g.point(ix, iy)) > 1.0) outside += m;
      }
    *tail_mass = total > 0.0 ? outside / total : 0.0;
  }
  GridField u = apply_multiplier(g, MultiplierKind::inv_dbar);
  // restore the mean mode analytically: dbar(conj z) = 1
  const cplx g0 = mean_mode(g);
  for (std::size_t iy = 0; iy < u.n(); ++iy)
    for (std::size_t ix = 0; ix < u.n(); ++ix)
      u.at(ix, iy) += g0 * std::conj(u.point(ix, iy));
  // normalize u(0) = 0 (the origin is a grid node)
  const cplx u0 = u.at(u.n() / 2, u.n() / 2);
  for (auto& z : u.raw()) z -= u0;
  return u;
}

GridField beurling_transform(const GridField& g) {
  return apply_multiplier(g, MultiplierKind::beurling);
}

BeltramiCoefficient::BeltramiCoefficient(GridField mu) : mu_(std::move(mu)) {
  if (mu_.extent() < 2.0)
    throw std::invalid_argument("BeltramiCoefficient: extent must be >= 2 for disk support");
  for (std::size_t iy = 0; iy < mu_.n(); ++iy)
    for (std::size_t ix = 0; ix < mu_.n(); ++ix) {
      if (std::abs(mu_.point(ix, iy)) > 1.0) {
        mu_.at(ix, iy) = 0.0;  // coefficient lives on the closed unit disk
        continue;
      }
      sup_ = std::max(sup_, std::abs(mu_.at(ix, iy)));
    }
  if (sup_ >= 1.0)
    throw std::invalid_argument("BeltramiCoefficient: need ||mu||_inf < 1");
}

InhomogeneousSolution solve_inhomogeneous(const BeltramiCoefficient& mu, const GridField& sigma,
                                          double p, double tol, int max_iter) {
  if (!(p > 2.0)) throw std::invalid_argument("solve_inhomogeneous: need p > 2");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_inhomogeneous: tol must be positive");
  const std::size_t n = sigma.n();
  if (mu.field().n() != n || mu.field().extent() != sigma.extent())
    throw std::invalid_argument("solve_inhomogeneous: grid mismatch");

  InhomogeneousSolution out;
  const double sig_p = sigma.norm_lp(p);
  const double sig_2 = sigma.norm_l2();

  auto mul_add = [&](const GridField& q) {
    GridField s = sigma;
    if (mu.sup() > 0.0 && q.n() == n)
      for (std::size_t i = 0; i < s.raw().size(); ++i)
        s.raw()[i] += mu.field().raw()[i] * q.raw()[i];
    return s;
  };

  GridField q = beurling_transform(sigma);
  out.iterations = 1;
  std::vector<double> ratios;
  double prev_inc = -1.0;
  if (mu.sup() > 0.0 && sig_p > 0.0) {
    int bad_streak = 0;
    for (int it = 0; it < max_iter; ++it) {
      GridField q_next = beurling_transform(mul_add(q));
      GridField diff = q_next;
      for (std::size_t i = 0; i < diff.raw().size(); ++i) diff.raw()[i] -= q.raw()[i];
      const double inc = diff.norm_lp(p);
      q = std::move(q_next);
      out.iterations = it + 2;
      if (it == 0) out.first_increment = inc;
      out.last_increment = inc;
      if (prev_inc > 0.0) {
        const double ratio = inc / prev_inc;
        ratios.push_back(ratio);
        bad_streak = (ratio >= 1.0) ? bad_streak + 1 : 0;
        if (bad_streak >= 10)
          throw std::runtime_error(
              "solve_inhomogeneous: non-contraction observed (p too large or ||mu|| too close "
              "to 1)");
      }
      prev_inc = inc;
      if (inc <= tol * sig_p) break;
      if (it == max_iter - 1)
        throw std::runtime_error(
            "solve_inhomogeneous: iteration budget exhausted before reaching tolerance");
    }
  }
  if (!ratios.empty()) {
    double acc = 0.0;
    for (double r : ratios) acc += std::log(std::max(r, 1e-300));
    out.contraction_rate = std::exp(acc / static_cast<double>(ratios.size()));
  }

  const GridField rhs = mul_add(q);
  out.u = cauchy_transform(rhs);
  // dbar u = rhs and d u = Gamma(rhs) exactly (operator identities), so the
  // equation defect is mu (q - Gamma(rhs)), the fixed-point closeness
  GridField du = beurling_transform(rhs);
  GridField resid = du;
  for (std::size_t i = 0; i < resid.raw().size(); ++i)
    resid.raw()[i] = rhs.raw()[i] - sigma.raw()[i] - mu.field().raw()[i] * resid.raw()[i];
  out.q = std::move(du);
  out.residual_rel = sig_2 > 0.0 ? resid.norm_l2() / sig_2 : resid.norm_l2();
  out.q_over_sigma_lp = sig_p > 0.0 ? out.q.norm_lp(p) / sig_p : 0.0;
  return out;
}

QcMap normalized_qc_map(const BeltramiCoefficient& mu, double p, double tol) {
  QcMap out;
  const std::size_t n = mu.field().n();
  if (mu.sup() == 0.0) {
    // conformal case: alpha = z exactly
    out.displacement = GridField(n, mu.field().extent());
    out.dz_u = out.displacement;
    out.dbar_u = out.displacement;
    out.min_jacobian = 1.0;
    out.jacobian_positive = true;
    return out;
  }
  auto sol = solve_inhomogeneous(mu, mu.field(), p, tol);
  out.displacement = std::move(sol.u);
  out.iterations = sol.iterations;
  out.contraction_rate = sol.contraction_rate;
  out.dz_u = std::move(sol.q);  // d u = Gamma(rhs) = q at the fixed point
  out.dbar_u = mu.field();
  for (std::size_t i = 0; i < out.dbar_u.raw().size(); ++i)
    out.dbar_u.raw()[i] *= (1.0 + out.dz_u.raw()[i]);  // mu (1 + q) = mu d alpha

  out.min_jacobian = 1e300;
  for (std::size_t i = 0; i < out.dz_u.raw().size(); ++i) {
    const double jac = std::norm(1.0 + out.dz_u.raw()[i]) - std::norm(out.dbar_u.raw()[i]);
    out.min_jacobian = std::min(out.min_jacobian, jac);
  }
  out.jacobian_positive = out.min_jacobian > 0.0;
  return out;
}

cplx qc_forward(const QcMap& alpha, cplx z) {
  return z + alpha.displacement.sample(z, true);
}

// Shared state for batched inversion: cached derivatives plus a bucket map
// of forward images for seeding.
class QcInverter {
 public:
  explicit QcInverter(const QcMap& alpha)
      : alpha_(alpha), du_(alpha.dz_u), dbu_(alpha.dbar_u) {
    const GridField& u = alpha.displacement;
    const std::size_t n = u.n();
    buckets_.assign(kBuckets * kBuckets, {});
    const std::size_t stride = std::max<std::size_t>(1, n / 256);
    for (std::size_t iy = 0; iy < n; iy += stride)
      for (std::size_t ix = 0; ix < n; ix += stride) {
        const cplx z = u.point(ix, iy);
        buckets_[bucket_of(z + u.at(ix, iy))].push_back(z);
      }
  }

  cplx invert(cplx w, double tol) const {
    cplx z = seed(w);
    double f_abs = 1e300;
    for (int it = 0; it < 80; ++it) {
      const cplx f = qc_forward(alpha_, z) - w;
      f_abs = std::abs(f);
      if (f_abs < tol) return z;
      const cplx a = 1.0 + du_.sample(z, true);
      const cplx b = dbu_.sample(z, true);
      // d alpha (h) = a h + b conj(h); solve a h + b conj(h) = f
      const double det = std::norm(a) - std::norm(b);
      if (det <= 1e-14) throw std::runtime_error("qc_invert: degenerate Jacobian");
      cplx step = (std::conj(a) * f - b * std::conj(f)) / det;
      // damping: keep |f| decreasing
      for (int half = 0; half < 30; ++half) {
        const cplx z_try = z - step;
        if (std::abs(qc_forward(alpha_, z_try) - w) < f_abs) {
          z = z_try;
          break;
        }
        step *= 0.5;
        if (half == 29) z = z_try;
      }
    }
    if (f_abs < 1e-6) return z;  // loose fallback for cells straddling kinks
    throw std::runtime_error("qc_invert: Newton failed to converge");
  }

 private:
  static constexpr std::size_t kBuckets = 64;
  std::size_t bucket_of(cplx w) const {
    const double L = alpha_.displacement.extent();
    auto clamp_idx = [&](double t) {
      const long i = static_cast<long>((t + L) / (2.0 * L) * kBuckets);
      return static_cast<std::size_t>(std::clamp<long>(i, 0, kBuckets - 1));
    };
    return clamp_idx(w.imag()) * kBuckets + clamp_idx(w.real());
  }
  cplx seed(cplx w) const {
    if (std::abs(w) > 1.2) return w;  // identity region
    cplx best = w;
    double best_d = std::abs(qc_forward(alpha_, w) - w);
    const std::size_t b = bucket_of(w);
    const long bx = static_cast<long>(b % kBuckets), by = static_cast<long>(b / kBuckets);
    for (long oy = -1; oy <= 1; ++oy)
      for (long ox = -1; ox <= 1; ++ox) {
        const long cx = bx + ox, cy = by + oy;
        if (cx < 0 || cy < 0 || cx >= static_cast<long>(kBuckets) ||
            cy >= static_cast<long>(kBuckets))
          continue;
        for (cplx z : buckets_[static_cast<std::size_t>(cy) * kBuckets +
                               static_cast<std::size_t>(cx)]) {
          const double d = std::abs(qc_forward(alpha_, z) - w);
          if (d < best_d) {
            best_d = d;
            best = z;
          }
        }
      }
    return best;
  }

  const QcMap& alpha_;
  GridField du_, dbu_;
  std::vector<std::vector<cplx>> buckets_;
};

cplx qc_invert(const QcMap& alpha, cplx w, double tol) {
  return QcInverter(alpha).invert(w, tol);
}

GridField inverse_coefficient(const BeltramiCoefficient& mu, const QcMap& alpha) {
  if (!alpha.jacobian_positive)
    throw std::invalid_argument("inverse_coefficient: forward map failed the Jacobian check");
  const std::size_t n = mu.field().n();
  const double L = mu.field().extent();
  const QcInverter inv(alpha);
  const GridField& du = alpha.dz_u;
  GridField nu(n, L);
  for (std::size_t iy = 0; iy < n; ++iy)
    for (std::size_t ix = 0; ix < n; ++ix) {
      const cplx w = nu.point(ix, iy);
      // outside the image of the disk the coefficient vanishes
      if (std::abs(w) > 1.0 + 4.0 * nu.spacing()) continue;
      cplx z;
      try {
        z = inv.invert(w, 1e-10);
      } catch (const std::runtime_error&) {
        throw std::runtime_error("inverse_coefficient: inversion failed at a grid node");
      }
      const cplx m = mu.field().sample(z, false);
      if (m == cplx(0.0, 0.0)) continue;
      const cplx da = 1.0 + du.sample(z, true);
      nu.at(ix, iy) = -(da / std::conj(da)) * m;
    }
  return nu;
}

HolderSolution holder_solve(const std::function<cplx(cplx)>& mu,
                            const std::function<cplx(cplx)>& gamma,
                            const std::function<cplx(cplx)>& delta_coef, double R, std::size_t n,
                            double tol) {
  if (!(R > 0.0)) throw std::invalid_argument("holder_solve: R must be positive");
  const double L = 4.0;
  // rescaled problem on the unit disk: zeta = z / R,
  //   dbar w~ = mu~ d w~ + (R gamma~) w~ + delta~,  w~(zeta) = w(R zeta) / R
  auto in_disk = [](cplx zeta) { return std::abs(zeta) <= 1.0; };
  GridField muf = GridField::from_function(
      n, L, [&](cplx zeta) { return in_disk(zeta) ? mu(R * zeta) : cplx(0, 0); });
  GridField gaf = GridField::from_function(
      n, L, [&](cplx zeta) { return in_disk(zeta) ? R * gamma(R * zeta) : cplx(0, 0); });
  GridField def = GridField::from_function(
      n, L, [&](cplx zeta) { return in_disk(zeta) ? delta_coef(R * zeta) : cplx(0, 0); });
  double mu_sup = 0.0;
  for (const auto& z : muf.raw()) mu_sup = std::max(mu_sup, std::abs(z));
  if (mu_sup >= 1.0) throw std::invalid_argument("holder_solve: need sup |mu| < 1 on B_R");

  const std::size_t i0 = n / 2;  // node of zeta = 0

  // Series terms carry (value, d, dbar) with derivatives propagated through
  // the operator identities d(A h) = Gamma h, dbar(A h) = h: the Cauchy-
  // transform values contain an analytic conj(zeta) part that must not be
  // re-differentiated spectrally.
  struct Term {
    GridField v, dz, dbar;
  };
  auto apply_T = [&](const Term& w) {
    GridField arg(n, L);
    for (std::size_t i = 0; i < arg.raw().size(); ++i)
      arg.raw()[i] = muf.raw()[i] * w.dz.raw()[i] + gaf.raw()[i] * w.v.raw()[i];
    Term out_t{cauchy_transform(arg), beurling_transform(arg), arg};
    const cplx g0 = out_t.dz.at(i0, i0);
    for (std::size_t iy = 0; iy < n; ++iy)
      for (std::size_t ix = 0; ix < n; ++ix) {
        out_t.v.at(ix, iy) -= out_t.v.point(ix, iy) * g0;  // - zeta Gamma(arg)(0)
        out_t.dz.at(ix, iy) -= g0;
      }
    return out_t;
  };

  // g = A delta - zeta (Gamma delta)(0) + zeta
  Term g{cauchy_transform(def), beurling_transform(def), def};
  {
    const cplx gd0 = g.dz.at(i0, i0);
    for (std::size_t iy = 0; iy < n; ++iy)
      for (std::size_t ix = 0; ix < n; ++ix) {
        g.v.at(ix, iy) += g.v.point(ix, iy) * (1.0 - gd0);
        g.dz.at(ix, iy) += (1.0 - gd0);
      }
  }

  auto c1_norm = [&](const Term& f) {
    double m = 0.0;
    for (std::size_t iy = 0; iy < n; ++iy)
      for (std::size_t ix = 0; ix < n; ++ix) {
        if (std::abs(f.v.point(ix, iy)) > 1.0) continue;  // norm over the disk
        m = std::max({m, std::abs(f.v.at(ix, iy)), std::abs(f.dz.at(ix, iy)),
                      std::abs(f.dbar.at(ix, iy))});
      }
    return m;
  };

  HolderSolution out;
  out.grid_extent_R = R;
  Term total = g;
  Term term = g;
  double prev = c1_norm(term);
  const double base = std::max(prev, 1e-300);
  for (int k = 0; k < 200; ++k) {
    term = apply_T(term);
    const double cur = c1_norm(term);
    if (prev > 0.0) {
      const double ratio = cur / prev;
      out.max_ratio = std::max(out.max_ratio, ratio);
      if (ratio >= 1.0)
        throw std::runtime_error("holder_solve: series ratio reached 1 (R too large)");
    }
    for (std::size_t i = 0; i < total.v.raw().size(); ++i) {
      total.v.raw()[i] += term.v.raw()[i];
      total.dz.raw()[i] += term.dz.raw()[i];
      total.dbar.raw()[i] += term.dbar.raw()[i];
    }
    prev = cur;
    if (cur <= tol * base) break;
  }

  // residual of the rescaled equation, sup over the disk
  {
    double worst = 0.0;
    for (std::size_t iy = 0; iy < n; ++iy)
      for (std::size_t ix = 0; ix < n; ++ix) {
        if (std::abs(total.v.point(ix, iy)) > 1.0) continue;
        const cplx r = total.dbar.at(ix, iy) - muf.at(ix, iy) * total.dz.at(ix, iy) -
                       gaf.at(ix, iy) * total.v.at(ix, iy) - def.at(ix, iy);
        worst = std::max(worst, std::abs(r));
      }
    out.residual_sup = worst;
  }
  out.w = std::move(total.v);
  return out;
}

BeltramiCoefficient coefficient_from_metric(const std::vector<double>& g11,
                                            const std::vector<double>& g12,
                                            const std::vector<double>& g22, std::size_t n,
                                            double extent) {
  if (g11.size() != n * n || g12.size() != n * n || g22.size() != n * n)
    throw std::invalid_argument("coefficient_from_metric: field size mismatch");
  GridField mu(n, extent);
  for (std::size_t i = 0; i < n * n; ++i) {
    const double det = g11[i] * g22[i] - g12[i] * g12[i];
    if (!(g11[i] > 0.0) || !(det > 0.0))
      throw std::invalid_argument("coefficient_from_metric: metric not positive definite");
    const cplx num(0.5 * (g11[i] - g22[i]), g12[i]);
    const double den = 0.5 * (g11[i] + g22[i]) + std::sqrt(det);
    mu.raw()[i] = num / den;
  }
  return BeltramiCoefficient(std::move(mu));
}

BpNormReport bp_norm(const GridField& u, double p, std::uint64_t seed, int n_random_pairs) {
  if (!(p > 2.0)) throw std::invalid_argument("bp_norm: need p > 2");
  const std::size_t n = u.n();
  const cplx u0 = u.at(n / 2, n / 2);
  if (std::abs(u0) > 1e-9) throw std::invalid_argument("bp_norm: u(0) must vanish");
  const double expo = 1.0 - 2.0 / p;

  BpNormReport rep;
  rep.p = p;
  Rng rng(seed);
  auto quotient = [&](std::size_t i1, std::size_t j1, std::size_t i2, std::size_t j2) {
    const cplx z1 = u.point(i1, j1), z2 = u.point(i2, j2);
    const double d = std::abs(z1 - z2);
    if (d < 1e-14) return 0.0;
    return std::abs(u.at(i1, j1) - u.at(i2, j2)) / std::pow(d, expo);
  };
  for (int k = 0; k < n_random_pairs; ++k) {
    const auto i1 = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(n) - 1));
    const auto j1 = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(n) - 1));
    const auto i2 = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(n) - 1));
    const auto j2 = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(n) - 1));
    rep.holder_part = std::max(rep.holder_part, quotient(i1, j1, i2, j2));
  }
  // deterministic coarse lattice sweep
  const std::size_t stride = std::max<std::size_t>(1, n / 16);
  for (std::size_t i1 = 0; i1 < n; i1 += stride)
    for (std::size_t j1 = 0; j1 < n; j1 += stride)
      for (std::size_t i2 = i1; i2 < n; i2 += stride)
        for (std::size_t j2 = (i2 == i1 ? j1 + stride : 0); j2 < n; j2 += stride)
          rep.holder_part = std::max(rep.holder_part, quotient(i1, j1, i2, j2));

  rep.dbar_lp = d_bar(u).norm_lp(p);
  rep.d_lp = d_z(u).norm_lp(p);
  rep.total = rep.holder_part + rep.dbar_lp + rep.d_lp;
  return rep;
}

}  // namespace reeblab
