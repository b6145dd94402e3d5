#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reeblab/numerics.hpp"

using namespace reeblab;

TEST_CASE("fft roundtrip and spectral derivative") {
  Rng rng(1);
  std::vector<cplx> a(64);
  for (auto& z : a) z = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  auto b = a;
  fft_inplace(b, -1);
  fft_inplace(b, +1);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-13);

  // derivative of e^{3 i t} on 32 points
  const std::size_t n = 32;
  std::vector<cplx> f(n);
  for (std::size_t j = 0; j < n; ++j) f[j] = std::exp(cplx(0.0, 3.0 * kTwoPi * j / n));
  fft_inplace(f, -1);
  for (std::size_t j = 0; j < n; ++j) {
    const long m = static_cast<long>(j < n / 2 ? j : j - n);
    f[j] *= cplx(0.0, static_cast<double>(m));
  }
  fft_inplace(f, +1);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx ref = cplx(0.0, 3.0) * std::exp(cplx(0.0, 3.0 * kTwoPi * j / n));
    CHECK(std::abs(f[j] - ref) < 1e-12);
  }
}

TEST_CASE("jacobi eigenvalues of a known matrix") {
  // [[2,1],[1,2]] has eigenvalues 1 and 3
  std::vector<double> A{2, 1, 1, 2};
  auto ev = eigen_sym_jacobi(A, 2);
  CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(ev[1] == doctest::Approx(3.0).epsilon(1e-13));

  // random symmetric: eigenvector residual
  Rng rng(7);
  const std::size_t n = 12;
  std::vector<double> B(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) B[i * n + j] = B[j * n + i] = rng.uniform(-1, 1);
  std::vector<double> V;
  auto evs = eigen_sym_jacobi(B, n, &V);
  for (std::size_t k = 0; k < n; ++k) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += B[i * n + j] * V[j * n + k];
      worst = std::max(worst, std::fabs(s - evs[k] * V[i * n + k]));
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("dense solve") {
  Rng rng(3);
  const std::size_t n = 20;
  std::vector<double> A(n * n), x_ref(n);
  for (auto& v : A) v = rng.uniform(-1, 1);
  for (auto& v : x_ref) v = rng.uniform(-1, 1);
  std::vector<double> b(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b[i] += A[i * n + j] * x_ref[j];
  auto x = solve_dense(A, b, n);
  for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(x_ref[i]).epsilon(1e-9));
}

TEST_CASE("quintic hermite endpoint conditions") {
  const double w = 0.7;
  auto q = Quintic::hermite(1.0, -2.0, 0.5, 0.3, -1.0, 4.0, w);
  CHECK(q.eval(0.0, 0, w) == doctest::Approx(1.0));
  CHECK(q.eval(0.0, 1, w) == doctest::Approx(-2.0));
  CHECK(q.eval(0.0, 2, w) == doctest::Approx(0.5));
  CHECK(q.eval(1.0, 0, w) == doctest::Approx(0.3));
  CHECK(q.eval(1.0, 1, w) == doctest::Approx(-1.0));
  CHECK(q.eval(1.0, 2, w) == doctest::Approx(4.0));
}

TEST_CASE("cumulative simpson against an analytic integral") {
  const std::size_t n = 101;
  const double h = 0.01;
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = std::exp(-2.0 * h * static_cast<double>(i));
  auto F = cumulative_simpson(f, h);
  for (std::size_t i = 0; i < n; ++i) {
    const double ref = (1.0 - std::exp(-2.0 * h * static_cast<double>(i))) / 2.0;
    CHECK(std::fabs(F[i] - ref) < 1e-8);
  }
}

TEST_CASE("richardson extrapolation") {
  // y = 5 + 3 x^2 + x^4 samples
  std::vector<double> x{0.1, 0.05, 0.025};
  std::vector<double> y;
  for (double v : x) y.push_back(5.0 + 3.0 * v * v + std::pow(v, 4));
  CHECK(richardson_limit(x, y, 2.0) == doctest::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("rng is deterministic and in range") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) {
    const double ua = a.uniform(), ub = b.uniform();
    CHECK(ua == ub);
    CHECK(ua >= 0.0);
    CHECK(ua < 1.0);
  }
}

TEST_CASE("smoothstep7 endpoints and derivatives") {
  CHECK(smoothstep7(0.0) == 0.0);
  CHECK(smoothstep7(1.0) == 1.0);
  for (int d = 1; d <= 3; ++d) {
    CHECK(std::fabs(smoothstep7_d(1e-9, d)) < 1e-5);
    CHECK(std::fabs(smoothstep7_d(1.0 - 1e-9, d)) < 1e-5);
  }
  // monotone
  double prev = 0.0;
  for (double u = 0.0; u <= 1.0; u += 0.01) {
    CHECK(smoothstep7(u) >= prev - 1e-15);
    prev = smoothstep7(u);
  }
}
