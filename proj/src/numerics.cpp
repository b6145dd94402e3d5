#include "reeblab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace reeblab {

double Mat2::max_abs() const {
  return std::max(std::max(std::fabs(a), std::fabs(b)), std::max(std::fabs(c), std::fabs(d)));
}

Mat2 Mat2::inverse() const {
  const double dt = det();
  if (std::fabs(dt) < 1e-300) throw std::runtime_error("Mat2::inverse: singular matrix");
  return {d / dt, -b / dt, -c / dt, a / dt};
}

Mat3 mat3_identity() {
  Mat3 I{};
  for (int i = 0; i < 3; ++i) I[i][i] = 1.0;
  return I;
}

Mat3 mat3_mul(const Mat3& A, const Mat3& B) {
  Mat3 C{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += A[i][k] * B[k][j];
      C[i][j] = s;
    }
  return C;
}

double mat3_det(const Mat3& A) {
  return A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
         A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
         A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
}

std::uint64_t Rng::next_u64() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(kTwoPi * u2);
  have_spare_ = true;
  return r * std::cos(kTwoPi * u2);
}

int Rng::uniform_int(int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(next_u64() % span);
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_inplace(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  if (!is_power_of_two(n)) throw std::invalid_argument("fft: size must be a power of two");
  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * kTwoPi / static_cast<double>(len);
    const cplx wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (sign > 0) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= inv;
  }
}

void fft2_inplace(std::vector<cplx>& a, std::size_t n, int sign) {
  if (a.size() != n * n) throw std::invalid_argument("fft2: bad buffer size");
  std::vector<cplx> tmp(n);
  // rows
  for (std::size_t r = 0; r < n; ++r) {
    std::copy(a.begin() + r * n, a.begin() + (r + 1) * n, tmp.begin());
    fft_inplace(tmp, sign);
    std::copy(tmp.begin(), tmp.end(), a.begin() + r * n);
  }
  // columns
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) tmp[r] = a[r * n + c];
    fft_inplace(tmp, sign);
    for (std::size_t r = 0; r < n; ++r) a[r * n + c] = tmp[r];
  }
}

std::vector<double> eigen_sym_jacobi(std::vector<double> A, std::size_t n,
                                     std::vector<double>* V) {
  if (A.size() != n * n) throw std::invalid_argument("eigen_sym_jacobi: bad size");
  if (V) {
    V->assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) (*V)[i * n + i] = 1.0;
  }
  auto off = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += A[i * n + j] * A[i * n + j];
    return s;
  };
  double norm = 0.0;
  for (double v : A) norm += v * v;
  const double tol = 1e-30 * (norm + 1.0);
  for (int sweep = 0; sweep < 80 && off() > tol; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = A[p * n + q];
        if (std::fabs(apq) < 1e-300) continue;
        const double app = A[p * n + p], aqq = A[q * n + q];
        const double theta = 0.5 * (aqq - app) / apq;
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = A[k * n + p], akq = A[k * n + q];
          A[k * n + p] = c * akp - s * akq;
          A[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = A[p * n + k], aqk = A[q * n + k];
          A[p * n + k] = c * apk - s * aqk;
          A[q * n + k] = s * apk + c * aqk;
        }
        if (V) {
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = (*V)[k * n + p], vkq = (*V)[k * n + q];
            (*V)[k * n + p] = c * vkp - s * vkq;
            (*V)[k * n + q] = s * vkp + c * vkq;
          }
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = A[i * n + i];
  if (!V) {
    std::sort(ev.begin(), ev.end());
    return ev;
  }
  // sort eigenpairs together
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return ev[i] < ev[j]; });
  std::vector<double> evs(n), Vs(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    evs[j] = ev[idx[j]];
    for (std::size_t i = 0; i < n; ++i) Vs[i * n + j] = (*V)[i * n + idx[j]];
  }
  *V = std::move(Vs);
  return evs;
}

std::vector<double> singular_values(const std::vector<double>& A, std::size_t m, std::size_t n) {
  if (A.size() != m * n) throw std::invalid_argument("singular_values: bad size");
  std::vector<double> G(n * n, 0.0);  // A^T A
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += A[k * n + i] * A[k * n + j];
      G[i * n + j] = s;
      G[j * n + i] = s;
    }
  auto ev = eigen_sym_jacobi(std::move(G), n);
  for (auto& v : ev) v = std::sqrt(std::max(v, 0.0));
  return ev;
}

std::vector<double> solve_dense(std::vector<double> A, std::vector<double> b, std::size_t n) {
  if (A.size() != n * n || b.size() != n) throw std::invalid_argument("solve_dense: bad size");
  std::vector<std::size_t> piv(n);
  for (std::size_t i = 0; i < n; ++i) piv[i] = i;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = col;
    double bv = std::fabs(A[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::fabs(A[r * n + col]);
      if (v > bv) {
        bv = v;
        best = r;
      }
    }
    if (bv < 1e-300) throw std::runtime_error("solve_dense: singular matrix");
    if (best != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(A[col * n + k], A[best * n + k]);
      std::swap(b[col], b[best]);
    }
    const double d = A[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = A[r * n + col] / d;
      if (f == 0.0) continue;
      A[r * n + col] = 0.0;
      for (std::size_t k = col + 1; k < n; ++k) A[r * n + k] -= f * A[col * n + k];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= A[i * n + k] * x[k];
    x[i] = s / A[i * n + i];
  }
  return x;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (std::fabs(den) < 1e-300) throw std::runtime_error("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

std::vector<double> cumulative_simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> F(n, 0.0);
  if (n < 2) return F;
  if (n == 2) {
    F[1] = 0.5 * h * (f[0] + f[1]);
    return F;
  }
  for (std::size_t k = 0; k + 2 < n; k += 2) {
    F[k + 1] = F[k] + (h / 12.0) * (5.0 * f[k] + 8.0 * f[k + 1] - f[k + 2]);
    F[k + 2] = F[k] + (h / 3.0) * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
  }
  if (n % 2 == 0)  // trailing interval: mirrored half-rule on the last triple
    F[n - 1] = F[n - 2] + (h / 12.0) * (-f[n - 3] + 8.0 * f[n - 2] + 5.0 * f[n - 1]);
  return F;
}

double richardson_limit(const std::vector<double>& x, const std::vector<double>& y, double order) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("richardson: need >= 2");
  // Neville elimination in t = x^order toward t = 0.
  std::vector<double> t(x.size()), v = y;
  for (std::size_t i = 0; i < x.size(); ++i) t[i] = std::pow(x[i], order);
  for (std::size_t level = 1; level < v.size(); ++level)
    for (std::size_t i = 0; i + level < v.size(); ++i)
      v[i] = (t[i] * v[i + 1] - t[i + level] * v[i]) / (t[i] - t[i + level]);
  return v[0];
}

Quintic Quintic::hermite(double v0, double d0, double dd0, double v1, double d1, double dd1,
                         double w) {
  // Scale derivatives to the unit interval.
  const double D0 = d0 * w, DD0 = dd0 * w * w;
  const double D1 = d1 * w, DD1 = dd1 * w * w;
  Quintic q;
  q.c[0] = v0;
  q.c[1] = D0;
  q.c[2] = 0.5 * DD0;
  // Remaining three coefficients from the right-end conditions.
  const double r0 = v1 - (q.c[0] + q.c[1] + q.c[2]);
  const double r1 = D1 - (q.c[1] + 2.0 * q.c[2]);
  const double r2 = DD1 - 2.0 * q.c[2];
  q.c[3] = 10.0 * r0 - 4.0 * r1 + 0.5 * r2;
  q.c[4] = -15.0 * r0 + 7.0 * r1 - r2;
  q.c[5] = 6.0 * r0 - 3.0 * r1 + 0.5 * r2;
  return q;
}

double Quintic::eval(double u, int deriv, double w) const {
  double out = 0.0;
  switch (deriv) {
    case 0:
      for (int k = 5; k >= 0; --k) out = out * u + c[k];
      return out;
    case 1:
      for (int k = 5; k >= 1; --k) out = out * u + k * c[k];
      return out / w;
    case 2:
      for (int k = 5; k >= 2; --k) out = out * u + k * (k - 1) * c[k];
      return out / (w * w);
    case 3:
      for (int k = 5; k >= 3; --k) out = out * u + k * (k - 1) * (k - 2) * c[k];
      return out / (w * w * w);
    default:
      throw std::invalid_argument("Quintic::eval: derivative order must be 0..3");
  }
}

double smoothstep7(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double u4 = u * u * u * u;
  return u4 * (35.0 - 84.0 * u + 70.0 * u * u - 20.0 * u * u * u);
}

double smoothstep7_d(double u, int deriv) {
  if (u <= 0.0 || u >= 1.0) return deriv == 0 ? smoothstep7(u) : 0.0;
  switch (deriv) {
    case 0:
      return smoothstep7(u);
    case 1:
      return u * u * u * (140.0 - 420.0 * u + 420.0 * u * u - 140.0 * u * u * u);
    case 2:
      return u * u * (420.0 - 1680.0 * u + 2100.0 * u * u - 840.0 * u * u * u);
    case 3:
      return u * (840.0 - 5040.0 * u + 8400.0 * u * u - 4200.0 * u * u * u);
    default:
      throw std::invalid_argument("smoothstep7_d: derivative order must be 0..3");
  }
}

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double angle_dist_to_int(double x) {
  const double f = x - std::floor(x);
  return std::min(f, 1.0 - f);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  const double h = (b - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + h * static_cast<double>(i);
  v.back() = b;
  return v;
}

std::vector<double> geomspace(double a, double b, std::size_t n) {
  if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("geomspace: endpoints must be positive");
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  const double la = std::log(a), lb = std::log(b);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1));
  v.back() = b;
  return v;
}

}  // namespace reeblab
