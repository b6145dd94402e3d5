#pragma once

#include <functional>
#include <vector>

#include "reeblab/numerics.hpp"

namespace reeblab {

// Complex samples on the uniform periodic grid of the square [-L, L]^2,
// nodes x_i = -L + 2L i / n, row-major over (iy, ix). n is a power of two
// and L >= 2 so that unit-disk data sits well inside the box.
class GridField {
 public:
  GridField() = default;
  GridField(std::size_t n, double extent, cplx fill = {0.0, 0.0});

  std::size_t n() const { return n_; }
  double extent() const { return extent_; }
  double spacing() const { return 2.0 * extent_ / static_cast<double>(n_); }
  double coord(std::size_t i) const;  // grid coordinate of index i
  cplx point(std::size_t ix, std::size_t iy) const { return {coord(ix), coord(iy)}; }

  cplx& at(std::size_t ix, std::size_t iy) { return v_[iy * n_ + ix]; }
  const cplx& at(std::size_t ix, std::size_t iy) const { return v_[iy * n_ + ix]; }
  std::vector<cplx>& raw() { return v_; }
  const std::vector<cplx>& raw() const { return v_; }

  // value at the node closest to z; bil = true interpolates bilinearly
  cplx sample(cplx z, bool bil) const;

  double norm_l2() const;              // (sum |v|^2 dx dy)^{1/2}
  double norm_lp(double p) const;      // (sum |v|^p dx dy)^{1/p}
  double norm_sup() const;

  // fill from a pointwise function of z
  static GridField from_function(std::size_t n, double extent,
                                 const std::function<cplx(cplx)>& f);

 private:
  std::size_t n_ = 0;
  double extent_ = 0.0;
  std::vector<cplx> v_;
};

// Wirtinger derivatives by Fourier multiplier on the periodic box.
GridField d_bar(const GridField& g);  // (d/dx + i d/dy)/2
GridField d_z(const GridField& g);    // (d/dx - i d/dy)/2

// Cauchy transform: the solution of dbar(Ag) = g with Ag(0) = 0. Nonzero
// frequencies invert the dbar symbol; the lost mean mode is restored by the
// analytic term mean(g) * (conj(z) - conj(z0)). The values are exact away
// from the box seam, but the conj(z) part is not periodic, so derivatives of
// A-outputs must be taken through the operator identities d(Ag) = Gamma(g),
// dbar(Ag) = g rather than by re-applying the spectral multipliers (the
// solvers below do exactly that). Warns (via *tail_mass) when g carries
// mass outside the unit disk.
GridField cauchy_transform(const GridField& g, double* tail_mass = nullptr);

// Mean of g over the box: the coefficient of the analytic conj(z) term.
cplx mean_mode(const GridField& g);

// Beurling transform: Fourier multiplier conj(w)/w, w = kx + i ky (zero mode
// annihilated), so that d_z(cauchy_transform(g)) == beurling_transform(g).
GridField beurling_transform(const GridField& g);

// Beltrami coefficient: |mu| < 1, supported in the closed unit disk.
class BeltramiCoefficient {
 public:
  explicit BeltramiCoefficient(GridField mu);
  const GridField& field() const { return mu_; }
  double sup() const { return sup_; }

 private:
  GridField mu_;
  double sup_ = 0.0;
};

struct InhomogeneousSolution {
  GridField u;  // solution with u(0) = 0
  GridField q;  // d_z u at the fixed point
  int iterations = 0;
  double contraction_rate = 0.0;  // geometric mean of increment ratios
  double first_increment = 0.0;   // ||q_2 - q_1||_p, seeds the geometric model
  double last_increment = 0.0;
  double residual_rel = 0.0;      // ||dbar u - mu d_z u - sigma||_2 / ||sigma||_2
  double q_over_sigma_lp = 0.0;   // measured ||q||_p / ||sigma||_p
};

// Fixed-point solve of dbar u = mu d_z u + sigma via q <- Gamma(mu q + sigma),
// u = A(mu q + sigma). Throws on observed non-contraction (ratio >= 1 over 10
// successive iterates) or iteration-budget exhaustion.
InhomogeneousSolution solve_inhomogeneous(const BeltramiCoefficient& mu, const GridField& sigma,
                                          double p, double tol, int max_iter = 600);

struct QcMap {
  GridField displacement;  // u = alpha - z (identically zero when mu == 0)
  GridField dz_u;          // d u, from the fixed point q (not re-differentiated)
  GridField dbar_u;        // dbar u = mu q + sigma
  int iterations = 0;
  double contraction_rate = 0.0;
  double min_jacobian = 0.0;  // min over grid of |d alpha|^2 - |dbar alpha|^2
  bool jacobian_positive = false;
};

// Normalized quasiconformal map alpha(z) = z + u(z), alpha(0) = 0,
// dbar alpha = mu d_z alpha.
QcMap normalized_qc_map(const BeltramiCoefficient& mu, double p, double tol);

// Beltrami coefficient of the inverse map:
//   nu(w) = -(d alpha / conj(d alpha))(alpha^{-1}(w)) mu(alpha^{-1}(w)),
// with alpha^{-1} by per-node Newton on the forward map.
GridField inverse_coefficient(const BeltramiCoefficient& mu, const QcMap& alpha);

// Forward evaluation and inversion helpers for a computed map.
cplx qc_forward(const QcMap& alpha, cplx z);
cplx qc_invert(const QcMap& alpha, cplx w, double tol = 1e-10);

// Holder-space solve of dbar w = mu d_z w + gamma w + delta on the disk of
// radius R with w(0) = 0, d_z w(0) = 1, by the Neumann series of
//   (Tw)(z) = A(mu d_z w + gamma w)(z) - z Gamma(mu d_z w + gamma w)(0).
// Fields are supplied as functions of z on B_R; computation runs on the
// rescaled unit disk. Throws if the measured series ratio reaches 1.
struct HolderSolution {
  GridField w;            // on the rescaled grid (zeta = z / R), value w(R zeta)
  double grid_extent_R;   // R, for mapping back
  double max_ratio = 0.0; // sup of successive series-term ratios (theta)
  double residual_sup = 0.0;
};
HolderSolution holder_solve(const std::function<cplx(cplx)>& mu,
                            const std::function<cplx(cplx)>& gamma,
                            const std::function<cplx(cplx)>& delta_coef, double R,
                            std::size_t n = 256, double tol = 1e-10);

// mu = ((g11 - g22)/2 + i g12) / ((g11 + g22)/2 + sqrt(det g)) pointwise;
// requires g positive definite (then |mu| < 1 automatically).
BeltramiCoefficient coefficient_from_metric(const std::vector<double>& g11,
                                            const std::vector<double>& g12,
                                            const std::vector<double>& g22, std::size_t n,
                                            double extent);

struct BpNormReport {
  double holder_part = 0.0;  // sup |u(z1)-u(z2)| / |z1-z2|^{1-2/p} over sampled pairs
  double dbar_lp = 0.0;
  double d_lp = 0.0;
  double total = 0.0;
  double p = 0.0;
};

// Three-part norm with the Holder quotient estimated over >= 10^4 seeded
// random pairs plus a coarse deterministic lattice of pairs.
BpNormReport bp_norm(const GridField& u, double p, std::uint64_t seed = 0x5EED,
                     int n_random_pairs = 10000);

}  // namespace reeblab
