#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace reeblab {

using cplx = std::complex<double>;

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.1415926535897932384626433832795;

// ---------------------------------------------------------------------------
// small linear algebra

struct Vec2 {
  double x = 0.0, y = 0.0;
};

// 2x2 real matrix, row-major: [[a, b], [c, d]].
struct Mat2 {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
  Mat2 scaled(double s) const { return {s * a, s * b, s * c, s * d}; }
  Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  double det() const { return a * d - b * c; }
  double max_abs() const;
  Mat2 inverse() const;
};

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 mat3_identity();
Mat3 mat3_mul(const Mat3& A, const Mat3& B);
double mat3_det(const Mat3& A);

// ---------------------------------------------------------------------------
// deterministic random numbers
//
// A fixed splitmix/xoshiro-style generator so that seeded runs are
// byte-identical across standard libraries (std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next_u64();
  // uniform in [0, 1)
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // standard normal via Box-Muller
  double normal();
  int uniform_int(int lo, int hi);  // inclusive bounds

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// FFT (iterative radix-2, in-place)

// n must be a power of two. sign = -1 forward, +1 inverse (inverse divides by n).
void fft_inplace(std::vector<cplx>& a, int sign);
bool is_power_of_two(std::size_t n);

// 2D transforms on an n x n row-major array.
void fft2_inplace(std::vector<cplx>& a, std::size_t n, int sign);

// ---------------------------------------------------------------------------
// symmetric eigen / singular values

// Cyclic Jacobi for a dense symmetric matrix (row-major n x n).
// Returns eigenvalues sorted ascending; optionally accumulates eigenvectors
// (columns of V, row-major).
std::vector<double> eigen_sym_jacobi(std::vector<double> A, std::size_t n,
                                     std::vector<double>* V = nullptr);

// Singular values of a dense real m x n matrix (row-major), sorted ascending.
// Computed through the eigenvalues of A^T A.
std::vector<double> singular_values(const std::vector<double>& A, std::size_t m, std::size_t n);

// ---------------------------------------------------------------------------
// dense linear solves

// Solves A x = b in-place via partial-pivot LU. Throws on numerical singularity.
std::vector<double> solve_dense(std::vector<double> A, std::vector<double> b, std::size_t n);

// ---------------------------------------------------------------------------
// fits and quadrature

// Least-squares slope/intercept of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Cumulative integral of f sampled on a uniform grid with spacing h.
// Composite Simpson over step pairs; odd nodes use the 4th-order
// interpolatory half-rule (h/12)(5 f_k + 8 f_{k+1} - f_{k+2}).
std::vector<double> cumulative_simpson(const std::vector<double>& f, double h);

// Richardson extrapolation to zero of samples (x_i, y_i) assuming
// y = y0 + c x^order + ...
double richardson_limit(const std::vector<double>& x, const std::vector<double>& y, double order);

// ---------------------------------------------------------------------------
// piecewise polynomial helpers

// Quintic Hermite basis on [0,1] from endpoint (value, d1, d2).
// Evaluates value and first three derivatives at u in [0,1] for a segment of
// width w (derivatives are with respect to the unscaled variable).
struct Quintic {
  std::array<double, 6> c{};  // monomial coefficients in the local variable u

  static Quintic hermite(double v0, double d0, double dd0, double v1, double d1, double dd1,
                         double w);
  double eval(double u, int deriv, double w) const;
};

// C^3 smoothstep: 35u^4 - 84u^5 + 70u^6 - 20u^7 on [0,1] (first three
// derivatives vanish at both ends).
double smoothstep7(double u);
double smoothstep7_d(double u, int deriv);

// ---------------------------------------------------------------------------
// ODE integration

// Classical RK4 with fixed step for autonomous systems of dimension N.
template <std::size_t N>
using OdeRhs = std::function<std::array<double, N>(const std::array<double, N>&)>;

template <std::size_t N>
std::array<double, N> rk4_step(const OdeRhs<N>& f, const std::array<double, N>& y, double h) {
  auto add = [](std::array<double, N> u, const std::array<double, N>& v, double s) {
    for (std::size_t i = 0; i < N; ++i) u[i] += s * v[i];
    return u;
  };
  auto k1 = f(y);
  auto k2 = f(add(y, k1, 0.5 * h));
  auto k3 = f(add(y, k2, 0.5 * h));
  auto k4 = f(add(y, k3, h));
  std::array<double, N> out = y;
  for (std::size_t i = 0; i < N; ++i)
    out[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

// ---------------------------------------------------------------------------
// misc

double wrap_angle(double a);                    // into [0, 2pi)
double angle_dist_to_int(double x);             // distance from x to nearest integer
std::vector<double> linspace(double a, double b, std::size_t n);
std::vector<double> geomspace(double a, double b, std::size_t n);

}  // namespace reeblab
