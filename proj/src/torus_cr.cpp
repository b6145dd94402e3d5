#include "reeblab/torus_cr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace reeblab {

namespace {

// FFT-layout frequency of bin j on an M-point axis
long bin_freq(std::size_t j, std::size_t M) {
  return static_cast<long>(j < M / 2 ? j : j - M);
}

std::size_t wrap_bin(int m, std::size_t M) {
  long v = m % static_cast<long>(M);
  if (v < 0) v += static_cast<long>(M);
  return static_cast<std::size_t>(v);
}

double coeff_l2(const std::vector<cplx>& c) {
  double s = 0.0;
  for (const auto& z : c) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace

TorusField::TorusField(int N, bool real_flag) : N_(N), real_(real_flag) {
  if (N < 1) throw std::invalid_argument("TorusField: N >= 1");
  c_.assign(static_cast<std::size_t>(side()) * side(), cplx(0.0, 0.0));
}

std::size_t TorusField::idx(int m, int n) const {
  if (std::abs(m) > N_ || std::abs(n) > N_)
    throw std::out_of_range("TorusField: mode out of truncation");
  return static_cast<std::size_t>(m + N_) * side() + static_cast<std::size_t>(n + N_);
}

void TorusField::enforce_conjugate_symmetry() {
  for (int m = -N_; m <= N_; ++m)
    for (int n = -N_; n <= N_; ++n) {
      if (m < 0 || (m == 0 && n < 0)) continue;
      const cplx avg = 0.5 * (coef(m, n) + std::conj(coef(-m, -n)));
      coef(m, n) = avg;
      coef(-m, -n) = std::conj(avg);
    }
}

bool TorusField::check_conjugate_symmetry(double tol) const {
  for (int m = -N_; m <= N_; ++m)
    for (int n = -N_; n <= N_; ++n)
      if (std::abs(coef(m, n) - std::conj(coef(-m, -n))) > tol) return false;
  return true;
}

cplx TorusField::eval(double s, double t) const {
  cplx acc(0.0, 0.0);
  for (int m = -N_; m <= N_; ++m)
    for (int n = -N_; n <= N_; ++n)
      acc += coef(m, n) * std::exp(cplx(0.0, m * s + n * t));
  return acc;
}

TorusField TorusField::derivative_s() const {
  TorusField d(N_, false);
  for (int m = -N_; m <= N_; ++m)
    for (int n = -N_; n <= N_; ++n) d.coef(m, n) = coef(m, n) * cplx(0.0, m);
  d.set_real_flag(real_);
  return d;
}

TorusField TorusField::derivative_t() const {
  TorusField d(N_, false);
  for (int m = -N_; m <= N_; ++m)
    for (int n = -N_; n <= N_; ++n) d.coef(m, n) = coef(m, n) * cplx(0.0, n);
  d.set_real_flag(real_);
  return d;
}

std::size_t collocation_size(int N) {
  std::size_t M = 8;
  while (M < 2 * static_cast<std::size_t>(2 * N + 1)) M <<= 1;
  return M;
}

std::vector<cplx> to_grid(const TorusField& f, std::size_t M) {
  if (M < static_cast<std::size_t>(f.side()))
    throw std::invalid_argument("to_grid: grid too small for truncation");
  std::vector<cplx> a(M * M, cplx(0.0, 0.0));
  for (int m = -f.N(); m <= f.N(); ++m)
    for (int n = -f.N(); n <= f.N(); ++n)
      a[wrap_bin(m, M) * M + wrap_bin(n, M)] = f.coef(m, n);
  fft2_inplace(a, M, +1);
  const double scale = static_cast<double>(M) * static_cast<double>(M);
  for (auto& z : a) z *= scale;
  return a;
}

TorusField from_grid(const std::vector<cplx>& values, std::size_t M, int N, bool real_flag) {
  if (values.size() != M * M) throw std::invalid_argument("from_grid: bad buffer");
  std::vector<cplx> a = values;
  fft2_inplace(a, M, -1);
  const double scale = 1.0 / (static_cast<double>(M) * static_cast<double>(M));
  TorusField f(N, real_flag);
  for (int m = -N; m <= N; ++m)
    for (int n = -N; n <= N; ++n) f.coef(m, n) = a[wrap_bin(m, M) * M + wrap_bin(n, M)] * scale;
  if (real_flag) f.enforce_conjugate_symmetry();
  return f;
}

TorusOneForm TorusOneForm::antilinear_from_scalar(const TorusField& g) {
  TorusOneForm s;
  s.comp_s = g;
  s.comp_t = g;
  for (auto& z : s.comp_t.raw()) z *= cplx(0.0, -1.0);
  s.comp_s.set_real_flag(false);
  s.comp_t.set_real_flag(false);
  s.antilinear = true;
  return s;
}

TorusField dbar_scalar(const TorusField& f) {
  TorusField d(f.N(), false);
  for (int m = -f.N(); m <= f.N(); ++m)
    for (int n = -f.N(); n <= f.N(); ++n)
      d.coef(m, n) = f.coef(m, n) * 0.5 * cplx(-n, m);  // (i m - n)/2
  return d;
}

DbarSplit dbar_solve_torus(const TorusOneForm& sigma) {
  if (!sigma.antilinear)
    throw std::invalid_argument("dbar_solve_torus: input must be tagged complex-antilinear");
  const TorusField& g = sigma.comp_s;
  DbarSplit out;
  out.zeta = TorusField(g.N(), false);
  TorusField h(g.N(), false);
  for (int m = -g.N(); m <= g.N(); ++m)
    for (int n = -g.N(); n <= g.N(); ++n) {
      if (m == 0 && n == 0) {
        h.coef(0, 0) = g.coef(0, 0);
        continue;
      }
      out.zeta.coef(m, n) = g.coef(m, n) * 2.0 / cplx(-n, m);
    }
  out.harmonic = TorusOneForm::antilinear_from_scalar(h);
  return out;
}

double dbar_reconstruction_error(const TorusOneForm& sigma, const DbarSplit& split) {
  const TorusField rec = dbar_scalar(split.zeta);
  std::vector<cplx> diff = sigma.comp_s.raw();
  for (std::size_t i = 0; i < diff.size(); ++i)
    diff[i] -= rec.raw()[i] + split.harmonic.comp_s.raw()[i];
  return coeff_l2(diff);
}

StructureField standard_structure(std::size_t M) {
  return StructureField(M * M, Mat2{0.0, -1.0, 1.0, 0.0});
}

double structure_distance_to_standard(const StructureField& j) {
  const Mat2 i0{0.0, -1.0, 1.0, 0.0};
  double d = 0.0;
  for (const auto& m : j) d = std::max(d, (m - i0).max_abs());
  return d;
}

namespace {

// mode enumeration for real scalar unknowns: representatives with
// m > 0 or (m == 0 && n > 0)
std::vector<std::pair<int, int>> rep_modes(int N) {
  std::vector<std::pair<int, int>> reps;
  for (int m = -N; m <= N; ++m)
    for (int n = -N; n <= N; ++n)
      if (m > 0 || (m == 0 && n > 0)) reps.emplace_back(m, n);
  return reps;
}

struct OneFormGrids {
  std::vector<double> s, t;  // real components on the M x M grid
};

// density of d(omega) for omega = (gs, gt) given as node samples:
// coefficients of ds(gt) - dt(gs), restricted to |modes| <= N
TorusField curl_coeffs(const std::vector<double>& gs, const std::vector<double>& gt,
                       std::size_t M, int N) {
  std::vector<cplx> as(M * M), at(M * M);
  for (std::size_t i = 0; i < M * M; ++i) {
    as[i] = gs[i];
    at[i] = gt[i];
  }
  const TorusField cs = from_grid(as, M, N, false);
  const TorusField ct = from_grid(at, M, N, false);
  TorusField d(N, true);
  for (int m = -N; m <= N; ++m)
    for (int n = -N; n <= N; ++n)
      d.coef(m, n) = cplx(0.0, m) * ct.coef(m, n) - cplx(0.0, n) * cs.coef(m, n);
  return d;
}

// gamma = c1 ds + c2 dt + d eps on the grid from eps coefficients
OneFormGrids gamma_grids(const std::array<double, 2>& cls, const TorusField& eps, std::size_t M) {
  const auto es = to_grid(eps.derivative_s(), M);
  const auto et = to_grid(eps.derivative_t(), M);
  OneFormGrids g;
  g.s.resize(M * M);
  g.t.resize(M * M);
  for (std::size_t i = 0; i < M * M; ++i) {
    g.s[i] = cls[0] + es[i].real();
    g.t[i] = cls[1] + et[i].real();
  }
  return g;
}

OneFormGrids compose_j(const OneFormGrids& w, const StructureField& j) {
  OneFormGrids out;
  const std::size_t n = w.s.size();
  out.s.resize(n);
  out.t.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.s[i] = j[i].a * w.s[i] + j[i].c * w.t[i];  // omega(j d/ds)
    out.t[i] = j[i].b * w.s[i] + j[i].d * w.t[i];  // omega(j d/dt)
  }
  return out;
}

// Assembles and solves the linear Galerkin system for the exact correction
// d eps making gamma = cls + d eps co-closed for j. Returns eps.
TorusField solve_harmonic_correction(const std::array<double, 2>& cls, const StructureField& j,
                                     std::size_t M, int N) {
  const auto reps = rep_modes(N);
  const std::size_t P = reps.size();
  auto density_rows = [&](const std::array<double, 2>& c, const TorusField& eps,
                          std::vector<double>& out) {
    const auto g = gamma_grids(c, eps, M);
    const auto w = compose_j(g, j);
    const TorusField D = curl_coeffs(w.s, w.t, M, N);
    out.resize(2 * P);
    for (std::size_t p = 0; p < P; ++p) {
      out[2 * p] = D.coef(reps[p].first, reps[p].second).real();
      out[2 * p + 1] = D.coef(reps[p].first, reps[p].second).imag();
    }
  };

  std::vector<double> A(4 * P * P, 0.0), rhs;
  density_rows(cls, TorusField(N, true), rhs);
  for (double& v : rhs) v = -v;

  std::vector<double> col;
  for (std::size_t q = 0; q < 2 * P; ++q) {
    TorusField eps(N, true);
    const auto [m, n] = reps[q / 2];
    const cplx unit = (q % 2 == 0) ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
    eps.coef(m, n) = unit;
    eps.coef(-m, -n) = std::conj(unit);
    density_rows({0.0, 0.0}, eps, col);
    for (std::size_t r = 0; r < 2 * P; ++r) A[r * 2 * P + q] = col[r];
  }
  std::vector<double> x;
  try {
    x = solve_dense(std::move(A), std::move(rhs), 2 * P);
  } catch (const std::runtime_error&) {
    throw std::runtime_error("hodge solve: elliptic system singular (structure too far from i)");
  }
  TorusField eps(N, true);
  for (std::size_t p = 0; p < P; ++p) {
    const auto [m, n] = reps[p];
    eps.coef(m, n) = cplx(x[2 * p], x[2 * p + 1]);
    eps.coef(-m, -n) = std::conj(eps.coef(m, n));
  }
  return eps;
}

}  // namespace

TorusOneForm hodge_representative(const std::array<double, 2>& class_vector,
                                  const StructureField& j, int N) {
  const std::size_t M = static_cast<std::size_t>(std::lround(std::sqrt(double(j.size()))));
  if (M * M != j.size() || !is_power_of_two(M) || M < 2 * static_cast<std::size_t>(2 * N + 1))
    throw std::invalid_argument("hodge_representative: structure grid must be a power-of-two "
                                "square with M >= 2(2N+1)");
  const TorusField eps = solve_harmonic_correction(class_vector, j, M, N);
  TorusOneForm gamma;
  gamma.comp_s = eps.derivative_s();
  gamma.comp_t = eps.derivative_t();
  gamma.comp_s.coef(0, 0) += class_vector[0];
  gamma.comp_t.coef(0, 0) += class_vector[1];
  gamma.comp_s.set_real_flag(true);
  gamma.comp_t.set_real_flag(true);
  const auto res = harmonicity_residual(gamma, j, N);
  if (res.d_gamma_j > 1e-8 || res.d_gamma > 1e-12)
    throw std::runtime_error("hodge_representative: elliptic solve did not converge");
  return gamma;
}

std::array<double, 2> cycle_periods(const TorusOneForm& gamma) {
  const int S = 512;
  double p1 = 0.0, p2 = 0.0;
  for (int i = 0; i < S; ++i) {
    const double x = kTwoPi * i / S;
    p1 += gamma.comp_s.eval(x, 0.0).real();
    p2 += gamma.comp_t.eval(0.0, x).real();
  }
  return {p1 / S, p2 / S};
}

HarmonicityResidual harmonicity_residual(const TorusOneForm& gamma, const StructureField& j,
                                         int N) {
  const std::size_t M = static_cast<std::size_t>(std::lround(std::sqrt(double(j.size()))));
  const auto gs = to_grid(gamma.comp_s, M);
  const auto gt = to_grid(gamma.comp_t, M);
  OneFormGrids g;
  g.s.resize(M * M);
  g.t.resize(M * M);
  for (std::size_t i = 0; i < M * M; ++i) {
    g.s[i] = gs[i].real();
    g.t[i] = gt[i].real();
  }
  HarmonicityResidual out;
  {
    const TorusField D = curl_coeffs(g.s, g.t, M, N);
    out.d_gamma = coeff_l2(D.raw());
  }
  {
    const auto w = compose_j(g, j);
    const TorusField D = curl_coeffs(w.s, w.t, M, N);
    out.d_gamma_j = coeff_l2(D.raw());
  }
  return out;
}

FredholmReport fredholm_index_report(int N) {
  if (N < 4) throw std::invalid_argument("fredholm_index_report: N >= 4");
  FredholmReport rep;
  std::vector<double> sv;
  for (int m = -N; m <= N; ++m)
    for (int n = -N; n <= N; ++n) sv.push_back(0.5 * std::hypot(double(m), double(n)));
  std::sort(sv.begin(), sv.end());
  int zeros = 0;
  double gap = 1e300;
  for (double v : sv) {
    if (v < 1e-12)
      ++zeros;
    else
      gap = std::min(gap, v);
  }
  if (gap < 0.1)
    throw std::runtime_error("fredholm_index_report: no clear zero cluster in singular values");
  rep.ker_dim = 2 * zeros;  // complex constants
  rep.coker_dim = 2;        // constant (0,1) mode
  rep.index = rep.ker_dim - rep.coker_dim;
  rep.gap = gap;
  return rep;
}

std::vector<double> perturbed_dbar_singular_values(int N, const TorusField& w_field) {
  const std::size_t M = collocation_size(std::max(N, w_field.N()));
  const auto w_nodes = to_grid(w_field, M);
  const int side = 2 * N + 1;
  const std::size_t K = static_cast<std::size_t>(side) * side;
  const std::size_t rows = 2 * (K - 1), cols = 2 * K;

  auto apply = [&](const TorusField& zeta, std::vector<double>& out) {
    const auto zn = to_grid(zeta, M);
    std::vector<cplx> lv(M * M);
    for (std::size_t i = 0; i < M * M; ++i) lv[i] = w_nodes[i] * zn[i].imag();
    const TorusField Lc = from_grid(lv, M, N, false);
    const TorusField Dc = dbar_scalar(zeta);
    out.resize(rows);
    std::size_t r = 0;
    for (int m = -N; m <= N; ++m)
      for (int n = -N; n <= N; ++n) {
        if (m == 0 && n == 0) continue;  // pi_1 kills the constant mode
        const cplx v = Dc.coef(m, n) + Lc.coef(m, n);
        out[r++] = v.real();
        out[r++] = v.imag();
      }
  };

  std::vector<double> A(rows * cols, 0.0), col;
  std::size_t q = 0;
  for (int m = -N; m <= N; ++m)
    for (int n = -N; n <= N; ++n)
      for (int part = 0; part < 2; ++part) {
        TorusField zeta(N, false);
        zeta.coef(m, n) = part == 0 ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
        apply(zeta, col);
        for (std::size_t r = 0; r < rows; ++r) A[r * cols + q] = col[r];
        ++q;
      }
  return singular_values(A, rows, cols);
}

std::vector<cplx> ZeroOrderOp::apply(const std::vector<cplx>& zeta_nodes, std::size_t M) const {
  std::vector<cplx> out(zeta_nodes.size(), cplx(0.0, 0.0));
  if (!w) return out;
  const auto wn = to_grid(*w, M);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = wn[i] * zeta_nodes[i].imag();
  return out;
}

TorusOneForm linearized_cr_apply(const TorusField& zeta, const std::array<double, 2>& cls,
                                 const ZeroOrderOp& L) {
  TorusField g = dbar_scalar(zeta);
  g.coef(0, 0) += cplx(cls[0], cls[1]);
  if (L.w) {
    const std::size_t M = collocation_size(std::max(zeta.N(), L.w->N()));
    const auto lv = L.apply(to_grid(zeta, M), M);
    const TorusField Lc = from_grid(lv, M, zeta.N(), false);
    for (std::size_t i = 0; i < g.raw().size(); ++i) g.raw()[i] += Lc.raw()[i];
  }
  return TorusOneForm::antilinear_from_scalar(g);
}

// ---------------------------------------------------------------------------
// Newton solver

RhsData RhsData::zero(std::size_t M) {
  RhsData d;
  d.M = M;
  d.lam_s.assign(M * M, 0.0);
  d.lam_t.assign(M * M, 0.0);
  d.da0_s.assign(M * M, 0.0);
  d.da0_t.assign(M * M, 0.0);
  return d;
}

namespace {

struct ModelWorkspace {
  int N;
  std::size_t M;
  std::vector<std::pair<int, int>> reps;
  std::size_t K;      // (2N+1)^2
  std::size_t n_unk;  // 3K + 1
  const RhsData* rhs;
  const StructureHandle* j_dep;
  double f_mean_target;
  std::vector<double> s_of_node, t_of_node;

  explicit ModelWorkspace(const RhsData& r, const StructureHandle& jd, const NewtonOptions& o)
      : N(o.N), M(r.M), reps(rep_modes(o.N)), rhs(&r), j_dep(&jd),
        f_mean_target(o.f_mean_target) {
    if (!is_power_of_two(M) || M < 2 * static_cast<std::size_t>(2 * N + 1))
      throw std::invalid_argument("newton_solve_model: collocation grid too small");
    K = static_cast<std::size_t>(2 * N + 1) * (2 * N + 1);
    n_unk = 3 * K + 1;
    s_of_node.resize(M * M);
    t_of_node.resize(M * M);
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t jn = 0; jn < M; ++jn) {
        s_of_node[i * M + jn] = kTwoPi * static_cast<double>(i) / static_cast<double>(M);
        t_of_node[i * M + jn] = kTwoPi * static_cast<double>(jn) / static_cast<double>(M);
      }
  }

  void unpack(const std::vector<double>& x, TorusField& zeta, TorusField& eps,
              std::array<double, 2>& cls) const {
    zeta = TorusField(N, false);
    eps = TorusField(N, true);
    std::size_t q = 0;
    for (int m = -N; m <= N; ++m)
      for (int n = -N; n <= N; ++n) {
        zeta.coef(m, n) = cplx(x[q], x[q + 1]);
        q += 2;
      }
    for (const auto& [m, n] : reps) {
      eps.coef(m, n) = cplx(x[q], x[q + 1]);
      eps.coef(-m, -n) = std::conj(eps.coef(m, n));
      q += 2;
    }
    cls = {x[q], x[q + 1]};
  }

  void pack(const TorusField& zeta, const TorusField& eps, const std::array<double, 2>& cls,
            std::vector<double>& x) const {
    x.assign(n_unk, 0.0);
    std::size_t q = 0;
    for (int m = -N; m <= N; ++m)
      for (int n = -N; n <= N; ++n) {
        x[q] = zeta.coef(m, n).real();
        x[q + 1] = zeta.coef(m, n).imag();
        q += 2;
      }
    for (const auto& [m, n] : reps) {
      x[q] = eps.coef(m, n).real();
      x[q + 1] = eps.coef(m, n).imag();
      q += 2;
    }
    x[q] = cls[0];
    x[q + 1] = cls[1];
  }

  // full residual: CR rows (2K), co-closedness rows (K-1), two gauge rows
  void evaluate(const std::vector<double>& x, std::vector<double>& F) const {
    TorusField zeta, eps;
    std::array<double, 2> cls{};
    unpack(x, zeta, eps, cls);

    const auto zn = to_grid(zeta, M);
    const auto zs = to_grid(zeta.derivative_s(), M);
    const auto zt = to_grid(zeta.derivative_t(), M);
    const auto gg = gamma_grids(cls, eps, M);

    std::vector<cplx> res_s(M * M);
    std::vector<double> wjs(M * M), wjt(M * M);
    for (std::size_t i = 0; i < M * M; ++i) {
      const Mat2 j = (*j_dep)(s_of_node[i], t_of_node[i], zn[i].imag());
      const cplx dzj_s = j.a * zs[i] + j.c * zt[i];  // (d zeta o j)_s
      const cplx lhs = zs[i] + cplx(0.0, 1.0) * dzj_s;
      const double lam_js = j.a * rhs->lam_s[i] + j.c * rhs->lam_t[i];
      const double da0_js = j.a * rhs->da0_s[i] + j.c * rhs->da0_t[i];
      const double gam_js = j.a * gg.s[i] + j.c * gg.t[i];
      const cplx rhs_s = cplx(lam_js, -rhs->lam_s[i]) - cplx(rhs->da0_s[i], da0_js) -
                         cplx(gg.s[i], gam_js);
      res_s[i] = lhs - rhs_s;
      // co-closedness data for gamma o j
      wjs[i] = gam_js;
      wjt[i] = j.b * gg.s[i] + j.d * gg.t[i];
    }
    const TorusField res_c = from_grid(res_s, M, N, false);
    const TorusField den = curl_coeffs(wjs, wjt, M, N);

    F.assign(n_unk, 0.0);
    std::size_t q = 0;
    for (int m = -N; m <= N; ++m)
      for (int n = -N; n <= N; ++n) {
        F[q] = res_c.coef(m, n).real();
        F[q + 1] = res_c.coef(m, n).imag();
        q += 2;
      }
    for (const auto& [m, n] : reps) {
      F[q] = den.coef(m, n).real();
      F[q + 1] = den.coef(m, n).imag();
      q += 2;
    }
    F[q] = zeta.coef(0, 0).real();                       // mean(b) = 0
    F[q + 1] = zeta.coef(0, 0).imag() - f_mean_target;   // mean(f) pinned
  }
};

double vec_l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

CRSolution newton_solve_model(const RhsData& rhs, const StructureHandle& j_dep,
                              const CRSolution* init, const NewtonOptions& opts) {
  ModelWorkspace ws(rhs, j_dep, opts);

  std::vector<double> x;
  if (init) {
    TorusField eps(opts.N, true);
    // recover eps from the 1-form components (strip the constant part)
    for (int m = -opts.N; m <= opts.N; ++m)
      for (int n = -opts.N; n <= opts.N; ++n) {
        if (m == 0 && n == 0) continue;
        const cplx cs = init->gamma.comp_s.coef(m, n);
        eps.coef(m, n) = (m != 0) ? cs / cplx(0.0, m)
                                  : init->gamma.comp_t.coef(m, n) / cplx(0.0, n);
      }
    ws.pack(init->zeta, eps, init->gamma_class, x);
  } else {
    x.assign(ws.n_unk, 0.0);
  }

  CRSolution out;
  std::vector<double> F, Fp, Fm;
  ws.evaluate(x, F);
  double res = vec_l2(F);
  out.residual_history.push_back(res);
  int worse_streak = 0;

  for (int it = 0; it < opts.max_iter && res > opts.tol; ++it) {
    // central-difference Jacobian, column by column
    std::vector<double> J(ws.n_unk * ws.n_unk, 0.0);
    for (std::size_t qc = 0; qc < ws.n_unk; ++qc) {
      const double h = 1e-6 * (1.0 + std::fabs(x[qc]));
      std::vector<double> xp = x, xm = x;
      xp[qc] += h;
      xm[qc] -= h;
      ws.evaluate(xp, Fp);
      ws.evaluate(xm, Fm);
      const double inv = 1.0 / (2.0 * h);
      for (std::size_t r = 0; r < ws.n_unk; ++r) J[r * ws.n_unk + qc] = (Fp[r] - Fm[r]) * inv;
    }
    std::vector<double> step;
    try {
      step = solve_dense(std::move(J), F, ws.n_unk);
    } catch (const std::runtime_error&) {
      throw std::runtime_error(
          "newton_solve_model: rank deficiency beyond the expected gauge kernel");
    }
    for (std::size_t qc = 0; qc < ws.n_unk; ++qc) x[qc] -= step[qc];
    ws.evaluate(x, F);
    const double res_new = vec_l2(F);
    out.residual_history.push_back(res_new);
    worse_streak = (res_new > res) ? worse_streak + 1 : 0;
    if (worse_streak >= 3)
      throw std::runtime_error("newton_solve_model: Newton divergence (residual increased over "
                               "3 consecutive steps)");
    res = res_new;
    out.newton_iterations = it + 1;
  }
  if (res > opts.tol)
    throw std::runtime_error("newton_solve_model: iteration budget exhausted before tolerance");

  TorusField zeta, eps;
  std::array<double, 2> cls{};
  ws.unpack(x, zeta, eps, cls);
  out.zeta = zeta;
  out.gamma.comp_s = eps.derivative_s();
  out.gamma.comp_t = eps.derivative_t();
  out.gamma.comp_s.coef(0, 0) += cls[0];
  out.gamma.comp_t.coef(0, 0) += cls[1];
  out.gamma.comp_s.set_real_flag(true);
  out.gamma.comp_t.set_real_flag(true);
  out.gamma_class = cls;
  out.residual = res;
  // harmonicity rows alone
  {
    const std::size_t P = ws.reps.size();
    double acc = 0.0;
    for (std::size_t qf = 2 * ws.K; qf < 2 * ws.K + 2 * P; ++qf) acc += F[qf] * F[qf];
    out.harmonic_residual = std::sqrt(acc);
  }
  return out;
}

ManufacturedProblem make_manufactured_problem(std::uint64_t seed, int N, double amplitude) {
  Rng rng(seed);
  const std::size_t M = collocation_size(N);
  const int gen_N = 2;  // keep generated data well inside the truncation

  auto random_real_field = [&](double amp) {
    TorusField f(N, true);
    for (int m = -gen_N; m <= gen_N; ++m)
      for (int n = -gen_N; n <= gen_N; ++n) {
        if (m < 0 || (m == 0 && n <= 0)) continue;
        const cplx c(amp * rng.uniform(-1.0, 1.0), amp * rng.uniform(-1.0, 1.0));
        f.coef(m, n) = c;
        f.coef(-m, -n) = std::conj(c);
      }
    return f;
  };

  // prescribed solution pieces
  const TorusField b_star = random_real_field(amplitude);
  const TorusField f_star = random_real_field(amplitude);
  const TorusField c_field = random_real_field(0.4);
  const TorusField a0 = random_real_field(amplitude);
  const std::array<double, 2> cls{rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)};

  // structure handle j(s,t,f) = j0 + f c(s,t) [[-1,0],[f c, 1]]
  const auto c_nodes = to_grid(c_field, M);
  StructureHandle j_dep = [c_nodes, M](double s, double t, double f) -> Mat2 {
    const std::size_t i =
        static_cast<std::size_t>(std::llround(s / kTwoPi * static_cast<double>(M))) % M;
    const std::size_t jn =
        static_cast<std::size_t>(std::llround(t / kTwoPi * static_cast<double>(M))) % M;
    const double a = f * c_nodes[i * M + jn].real();
    return {-a, -1.0, 1.0 + a * a, a};
  };

  // structure samples at the prescribed f
  const auto fs_nodes = to_grid(f_star, M);
  StructureField j_star(M * M);
  for (std::size_t i = 0; i < M * M; ++i) {
    const double a = fs_nodes[i].real() * c_nodes[i].real();
    j_star[i] = {-a, -1.0, 1.0 + a * a, a};
  }

  // exact harmonic correction for the prescribed class and structure
  const TorusField eps_star = solve_harmonic_correction(cls, j_star, M, N);
  const auto gam = gamma_grids(cls, eps_star, M);

  // data: u0*lam = -(d a0 + d b + gamma - d f o j) o j
  const auto dbs = to_grid(b_star.derivative_s(), M);
  const auto dbt = to_grid(b_star.derivative_t(), M);
  const auto dfs = to_grid(f_star.derivative_s(), M);
  const auto dft = to_grid(f_star.derivative_t(), M);
  const auto da0s = to_grid(a0.derivative_s(), M);
  const auto da0t = to_grid(a0.derivative_t(), M);

  ManufacturedProblem prob;
  prob.rhs = RhsData::zero(M);
  for (std::size_t i = 0; i < M * M; ++i) {
    const Mat2& j = j_star[i];
    const double dfj_s = j.a * dfs[i].real() + j.c * dft[i].real();
    const double dfj_t = j.b * dfs[i].real() + j.d * dft[i].real();
    const double Xs = da0s[i].real() + dbs[i].real() + gam.s[i] - dfj_s;
    const double Xt = da0t[i].real() + dbt[i].real() + gam.t[i] - dfj_t;
    prob.rhs.lam_s[i] = -(j.a * Xs + j.c * Xt);
    prob.rhs.lam_t[i] = -(j.b * Xs + j.d * Xt);
    prob.rhs.da0_s[i] = da0s[i].real();
    prob.rhs.da0_t[i] = da0t[i].real();
  }
  prob.j_dep = j_dep;

  prob.truth.zeta = TorusField(N, false);
  for (int m = -N; m <= N; ++m)
    for (int n = -N; n <= N; ++n)
      prob.truth.zeta.coef(m, n) = b_star.coef(m, n) + cplx(0.0, 1.0) * f_star.coef(m, n);
  prob.truth.gamma.comp_s = eps_star.derivative_s();
  prob.truth.gamma.comp_t = eps_star.derivative_t();
  prob.truth.gamma.comp_s.coef(0, 0) += cls[0];
  prob.truth.gamma.comp_t.coef(0, 0) += cls[1];
  prob.truth.gamma_class = cls;

  prob.opts.N = N;
  prob.opts.f_mean_target = 0.0;
  prob.opts.tol = 1e-10;
  return prob;
}

L2BoundReport l2_bound_check(const CRSolution& sol, const RhsData& rhs,
                             const StructureHandle& j_dep) {
  const std::size_t M = rhs.M;
  const auto zn = to_grid(sol.zeta, M);
  const auto gs = to_grid(sol.gamma.comp_s, M);
  const auto gt = to_grid(sol.gamma.comp_t, M);

  double gamma_sq = 0.0, rhs_sq = 0.0;
  for (std::size_t i = 0; i < M * M; ++i) {
    const double s = kTwoPi * static_cast<double>(i / M) / static_cast<double>(M);
    const double t = kTwoPi * static_cast<double>(i % M) / static_cast<double>(M);
    const Mat2 j = j_dep(s, t, zn[i].imag());
    auto wedge = [&](double ws, double wt) {
      const double js = j.a * ws + j.c * wt;
      const double jt = j.b * ws + j.d * wt;
      return js * wt - jt * ws;
    };
    gamma_sq += wedge(gs[i].real(), gt[i].real());
    rhs_sq += wedge(rhs.lam_s[i], rhs.lam_t[i]);
  }
  const double cell = kTwoPi * kTwoPi / static_cast<double>(M * M);
  L2BoundReport rep;
  rep.gamma_norm = std::sqrt(std::max(gamma_sq * cell, 0.0));
  rep.rhs_norm = std::sqrt(std::max(rhs_sq * cell, 0.0));
  rep.satisfied = rep.gamma_norm <= rep.rhs_norm + 1e-8;
  return rep;
}

MonotonicityReport family_monotonicity_check(const std::vector<std::vector<double>>& f_family,
                                             double T_return) {
  if (f_family.size() < 2)
    throw std::invalid_argument("family_monotonicity_check: need >= 2 family members");
  MonotonicityReport rep;
  rep.worst_margin = 1e300;
  for (std::size_t k = 0; k + 1 < f_family.size(); ++k) {
    if (f_family[k].size() != f_family[k + 1].size())
      throw std::invalid_argument("family_monotonicity_check: size mismatch");
    for (std::size_t i = 0; i < f_family[k].size(); ++i)
      rep.worst_margin = std::min(rep.worst_margin, f_family[k + 1][i] - f_family[k][i]);
  }
  for (const auto& f : f_family)
    for (double v : f) rep.sup_norm = std::max(rep.sup_norm, std::fabs(v));
  rep.monotone = rep.worst_margin > 0.0;
  rep.bound_satisfied = rep.sup_norm <= T_return;
  return rep;
}

GradientBoundReport harmonic_gradient_bound_check(const std::vector<double>& h, std::size_t M,
                                                  double cs, double ct, double rho,
                                                  double rho_inner) {
  if (h.size() != M * M || !is_power_of_two(M))
    throw std::invalid_argument("harmonic_gradient_bound_check: bad grid");
  if (!(rho_inner < rho)) throw std::invalid_argument("gradient bound: need rho_inner < rho");
  // full-spectrum derivatives
  std::vector<cplx> a(M * M);
  for (std::size_t i = 0; i < M * M; ++i) a[i] = h[i];
  fft2_inplace(a, M, -1);
  std::vector<cplx> as(M * M), at(M * M);
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t jn = 0; jn < M; ++jn) {
      const cplx c = a[i * M + jn];
      as[i * M + jn] = c * cplx(0.0, double(bin_freq(i, M)));
      at[i * M + jn] = c * cplx(0.0, double(bin_freq(jn, M)));
    }
  fft2_inplace(as, M, +1);
  fft2_inplace(at, M, +1);

  auto torus_dist = [&](double a1, double b1) {
    const double d = std::fabs(a1 - b1);
    return std::min(d, kTwoPi - d);
  };
  GradientBoundReport rep;
  double sup_h = 0.0, sup_grad = 0.0;
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t jn = 0; jn < M; ++jn) {
      const double s = kTwoPi * static_cast<double>(i) / static_cast<double>(M);
      const double t = kTwoPi * static_cast<double>(jn) / static_cast<double>(M);
      const double d = std::hypot(torus_dist(s, cs), torus_dist(t, ct));
      if (d <= rho) sup_h = std::max(sup_h, std::fabs(h[i * M + jn]));
      if (d <= rho_inner)
        sup_grad = std::max(sup_grad, std::hypot(as[i * M + jn].real(), at[i * M + jn].real()));
    }
  rep.lhs = sup_grad;
  rep.rhs = 2.0 / (rho - rho_inner) * sup_h;
  rep.satisfied = rep.lhs <= rep.rhs * (1.0 + 1e-9);
  return rep;
}

}  // namespace reeblab
