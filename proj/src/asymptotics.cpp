#include "reeblab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace reeblab {

namespace {

// FFT-layout frequency of bin j on an N-point grid: m in [-N/2, N/2)
int bin_freq(std::size_t j, std::size_t N) {
  return static_cast<int>(j < N / 2 ? j : j - N);
}

double row_l2(const std::vector<cplx>& row) {
  double s = 0.0;
  for (const auto& z : row) s += std::norm(z);
  return std::sqrt(s * kTwoPi / static_cast<double>(row.size()));
}

}  // namespace

void LoopField::check() const {
  if (values.size() < 8 || values.size() % 2 != 0)
    throw std::invalid_argument("LoopField: need N >= 8 and even");
}

void HalfCylinderField::check() const {
  if (s_grid.size() < 2 || n_t < 8) throw std::invalid_argument("HalfCylinderField: grid too small");
  if (values.size() != s_grid.size()) throw std::invalid_argument("HalfCylinderField: row mismatch");
  for (const auto& row : values)
    if (row.size() != n_t) throw std::invalid_argument("HalfCylinderField: ragged rows");
  for (std::size_t i = 0; i + 1 < s_grid.size(); ++i)
    if (!(s_grid[i] < s_grid[i + 1]))
      throw std::invalid_argument("HalfCylinderField: s_grid must increase");
}

LoopField asymptotic_apply(double kappa, const LoopField& h) {
  h.check();
  const std::size_t N = h.size();
  std::vector<cplx> a = h.values;
  fft_inplace(a, -1);
  for (std::size_t j = 0; j < N; ++j) a[j] *= (kappa + bin_freq(j, N));
  fft_inplace(a, +1);
  return {std::move(a)};
}

std::vector<EigenCluster> spectrum(double kappa, int N, int n_eigs, double cluster_tol) {
  if (N < 8 || N % 2 != 0 || !is_power_of_two(static_cast<std::size_t>(N)))
    throw std::invalid_argument("spectrum: N must be an even power of two >= 8");
  if (n_eigs < 1 || n_eigs > N) throw std::invalid_argument("spectrum: need 1 <= n_eigs <= N");
  const std::size_t n = static_cast<std::size_t>(N);

  // Complex operator C = F^{-1} diag(kappa + m) F is Hermitian; embed as the
  // real symmetric 2N x 2N matrix [[Re C, -Im C], [Im C, Re C]].
  std::vector<cplx> col(n);
  std::vector<double> M(4 * n * n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    std::fill(col.begin(), col.end(), cplx(0.0, 0.0));
    col[c] = 1.0;
    fft_inplace(col, -1);
    for (std::size_t j = 0; j < n; ++j) col[j] *= (kappa + bin_freq(j, n));
    fft_inplace(col, +1);
    for (std::size_t r = 0; r < n; ++r) {
      const double re = col[r].real(), im = col[r].imag();
      M[r * 2 * n + c] = re;
      M[r * 2 * n + (c + n)] = -im;
      M[(r + n) * 2 * n + c] = im;
      M[(r + n) * 2 * n + (c + n)] = re;
    }
  }
  auto ev = eigen_sym_jacobi(std::move(M), 2 * n);

  std::vector<EigenCluster> clusters;
  for (double v : ev) {
    if (!clusters.empty() && std::fabs(v - clusters.back().value) < cluster_tol) {
      auto& c = clusters.back();
      c.value = (c.value * c.multiplicity + v) / (c.multiplicity + 1);
      c.multiplicity += 1;
    } else {
      clusters.push_back({v, 1});
    }
  }
  std::sort(clusters.begin(), clusters.end(),
            [kappa](const EigenCluster& a, const EigenCluster& b) {
              const double da = std::fabs(a.value - kappa), db = std::fabs(b.value - kappa);
              return da != db ? da < db : a.value < b.value;
            });
  if (clusters.size() > static_cast<std::size_t>(n_eigs)) clusters.resize(n_eigs);
  std::sort(clusters.begin(), clusters.end(),
            [](const EigenCluster& a, const EigenCluster& b) { return a.value < b.value; });
  return clusters;
}

int circle_degree(const LoopField& loop) {
  loop.check();
  double scale = 0.0;
  for (const auto& z : loop.values) scale = std::max(scale, std::abs(z));
  if (scale <= 0.0) throw std::invalid_argument("circle_degree: zero loop");

  // accumulate angle increments, refining by midpoint interpolation until
  // every increment subtends less than pi/2
  std::vector<cplx> pts = loop.values;
  for (int depth = 0; depth < 12; ++depth) {
    bool ok = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const cplx z0 = pts[i], z1 = pts[(i + 1) % pts.size()];
      if (std::abs(z0) < 1e-12 * scale)
        throw std::invalid_argument("circle_degree: sample too close to zero");
      if (std::fabs(std::arg(z1 / z0)) >= 0.5 * kPi) {
        ok = false;
        break;
      }
    }
    if (ok) break;
    if (depth == 11)
      throw std::runtime_error("circle_degree: loop under-resolved after refinement budget");
    std::vector<cplx> fine;
    fine.reserve(2 * pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      fine.push_back(pts[i]);
      fine.push_back(0.5 * (pts[i] + pts[(i + 1) % pts.size()]));
    }
    pts.swap(fine);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    total += std::arg(pts[(i + 1) % pts.size()] / pts[i]);
  const double deg = total / kTwoPi;
  const long rounded = std::lround(deg);
  if (std::fabs(deg - static_cast<double>(rounded)) > 1e-6)
    throw std::runtime_error("circle_degree: non-integer winding accumulation");
  return static_cast<int>(rounded);
}

RelAsymptotics relative_asymptotics_fit(const HalfCylinderField& diff) {
  diff.check();
  const std::size_t n_rows = diff.s_grid.size();
  const std::size_t half = n_rows / 2;
  const double floor = 1e3 * 2.220446049250313e-16;

  std::vector<double> xs, ys;
  std::size_t last_used = 0;
  for (std::size_t i = half; i < n_rows; ++i) {
    const double nrm = row_l2(diff.values[i]);
    if (nrm == 0.0)
      throw std::invalid_argument("relative_asymptotics_fit: a tail row vanishes identically");
    if (nrm < floor) continue;
    xs.push_back(diff.s_grid[i]);
    ys.push_back(std::log(nrm));
    last_used = i;
  }
  if (xs.size() < 4)
    throw std::invalid_argument("relative_asymptotics_fit: not enough usable tail rows");

  RelAsymptotics out;
  out.lambda_hat = fit_line(xs, ys).slope;

  const double s_star = diff.s_grid[last_used];
  out.e_loop.values.resize(diff.n_t);
  for (std::size_t j = 0; j < diff.n_t; ++j)
    out.e_loop.values[j] = diff.values[last_used][j] * std::exp(-out.lambda_hat * s_star);
  out.winding = circle_degree(out.e_loop);

  // remainder decay: row norms of diff e^{-lambda s} - e, fitted on the lower
  // half of the tail window where the e-loop estimation error is negligible
  std::vector<double> rx, ry;
  const std::size_t fit_hi = half + (last_used - half) / 2;
  for (std::size_t i = half; i + 1 < fit_hi; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < diff.n_t; ++j) {
      const cplx rem =
          diff.values[i][j] * std::exp(-out.lambda_hat * diff.s_grid[i]) - out.e_loop.values[j];
      acc += std::norm(rem);
    }
    const double nrm = std::sqrt(acc * kTwoPi / static_cast<double>(diff.n_t));
    if (nrm < floor) continue;
    rx.push_back(diff.s_grid[i]);
    ry.push_back(std::log(nrm));
  }
  out.remainder_rate = (rx.size() >= 4) ? -fit_line(rx, ry).slope : 0.0;
  return out;
}

namespace {

// bilinear evaluation with wrap-around in t
cplx bilinear(const HalfCylinderField& f, double s, double t) {
  const auto& sg = f.s_grid;
  const double s_cl = std::clamp(s, sg.front(), sg.back());
  auto it = std::upper_bound(sg.begin(), sg.end(), s_cl);
  std::size_t i = static_cast<std::size_t>(it - sg.begin());
  i = std::min(std::max<std::size_t>(i, 1), sg.size() - 1) - 1;
  const double ws = (s_cl - sg[i]) / (sg[i + 1] - sg[i]);
  const double dt = kTwoPi / static_cast<double>(f.n_t);
  double tw = std::fmod(t, kTwoPi);
  if (tw < 0) tw += kTwoPi;
  const std::size_t j = std::min(static_cast<std::size_t>(tw / dt), f.n_t - 1);
  const double wt = (tw - dt * static_cast<double>(j)) / dt;
  const std::size_t j1 = (j + 1) % f.n_t;
  return (1 - ws) * ((1 - wt) * f.values[i][j] + wt * f.values[i][j1]) +
         ws * ((1 - wt) * f.values[i + 1][j] + wt * f.values[i + 1][j1]);
}

int small_circle_degree(const HalfCylinderField& f, double s0, double t0, double radius) {
  LoopField loop;
  const int n = 256;
  loop.values.resize(n);
  for (int k = 0; k < n; ++k) {
    const double ang = kTwoPi * k / n;
    loop.values[k] = bilinear(f, s0 + radius * std::cos(ang), t0 + radius * std::sin(ang));
  }
  return circle_degree(loop);
}

}  // namespace

ZeroCountReport zero_count_check(const HalfCylinderField& field, double s_lo, double s_hi) {
  field.check();
  const auto& sg = field.s_grid;
  if (!(s_lo < s_hi) || s_lo < sg.front() - 1e-12 || s_hi > sg.back() + 1e-12)
    throw std::invalid_argument("zero_count_check: bad row range");
  auto row_index = [&](double s) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < sg.size(); ++i)
      if (std::fabs(sg[i] - s) < std::fabs(sg[best] - s)) best = i;
    return best;
  };
  const std::size_t i_lo = row_index(s_lo), i_hi = row_index(s_hi);
  if (i_hi <= i_lo + 1) throw std::invalid_argument("zero_count_check: rows too close");

  ZeroCountReport rep;
  rep.deg_lo = circle_degree({field.values[i_lo]});
  rep.deg_hi = circle_degree({field.values[i_hi]});

  // candidate cells: both components change sign among the corners
  const double dt = kTwoPi / static_cast<double>(field.n_t);
  std::vector<std::pair<std::size_t, std::size_t>> cand;
  for (std::size_t i = i_lo; i < i_hi; ++i) {
    for (std::size_t j = 0; j < field.n_t; ++j) {
      const cplx c00 = field.values[i][j], c01 = field.values[i][(j + 1) % field.n_t];
      const cplx c10 = field.values[i + 1][j], c11 = field.values[i + 1][(j + 1) % field.n_t];
      auto sgn_mix = [&](auto part) {
        const double a = part(c00), b = part(c01), c = part(c10), d = part(c11);
        const double mx = std::max({a, b, c, d}), mn = std::min({a, b, c, d});
        return mn <= 0.0 && mx >= 0.0;
      };
      if (sgn_mix([](cplx z) { return z.real(); }) && sgn_mix([](cplx z) { return z.imag(); }))
        cand.emplace_back(i, j);
    }
  }
  // cluster adjacent candidate cells
  std::vector<bool> used(cand.size(), false);
  const double ds_typ = (sg[i_lo + 1] - sg[i_lo]);
  for (std::size_t c0 = 0; c0 < cand.size(); ++c0) {
    if (used[c0]) continue;
    std::vector<std::size_t> cluster{c0};
    used[c0] = true;
    for (std::size_t k = 0; k < cluster.size(); ++k) {
      for (std::size_t c1 = 0; c1 < cand.size(); ++c1) {
        if (used[c1]) continue;
        const long di = std::labs(static_cast<long>(cand[cluster[k]].first) -
                                  static_cast<long>(cand[c1].first));
        long dj = std::labs(static_cast<long>(cand[cluster[k]].second) -
                            static_cast<long>(cand[c1].second));
        dj = std::min(dj, static_cast<long>(field.n_t) - dj);
        if (di <= 2 && dj <= 2) {
          used[c1] = true;
          cluster.push_back(c1);
        }
      }
    }
    // cluster center: minimum |F| over member cell corners
    double best = 1e300, cs = 0.0, ct = 0.0;
    double ext = 0.0;
    double cs_mean = 0.0, ct_ref = dt * static_cast<double>(cand[cluster[0]].second);
    for (std::size_t k = 0; k < cluster.size(); ++k) {
      const auto [ci, cj] = cand[cluster[k]];
      for (int oi = 0; oi <= 1; ++oi)
        for (int oj = 0; oj <= 1; ++oj) {
          const double sv = sg[ci + oi];
          double tv = dt * static_cast<double>((cj + oj) % field.n_t);
          // unwrap t near the reference
          if (tv - ct_ref > kPi) tv -= kTwoPi;
          if (ct_ref - tv > kPi) tv += kTwoPi;
          const double av = std::abs(field.values[ci + oi][(cj + oj) % field.n_t]);
          if (av < best) {
            best = av;
            cs = sv;
            ct = tv;
          }
        }
      cs_mean += sg[ci];
      ext = std::max(ext, static_cast<double>(cluster.size()));
    }
    (void)cs_mean;
    const double radius = (2.0 + std::sqrt(ext)) * std::max(ds_typ, dt);
    if (cs - radius < sg[i_lo] || cs + radius > sg[i_hi]) {
      // zero too close to a boundary row for a clean surrounding circle
      rep.zeros.emplace_back(cs, ct);
      continue;
    }
    const int order = small_circle_degree(field, cs, ct, radius);
    rep.zero_order_sum += order;
    rep.zeros.emplace_back(cs, ct);
  }
  rep.consistent = (rep.deg_hi == rep.deg_lo + rep.zero_order_sum);
  return rep;
}

}  // namespace reeblab
