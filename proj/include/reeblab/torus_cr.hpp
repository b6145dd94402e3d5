#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "reeblab/numerics.hpp"

namespace reeblab {

// Truncated Fourier representation of a function on the flat 2pi-periodic
// torus: f(s, t) = sum c_{m,n} e^{i(m s + n t)}, |m|, |n| <= N.
// real_flag marks real-valued fields (c_{-m,-n} = conj c_{m,n}).
class TorusField {
 public:
  TorusField() = default;
  TorusField(int N, bool real_flag);

  int N() const { return N_; }
  int side() const { return 2 * N_ + 1; }
  bool real_flag() const { return real_; }
  void set_real_flag(bool r) { real_ = r; }

  cplx& coef(int m, int n) { return c_[idx(m, n)]; }
  const cplx& coef(int m, int n) const { return c_[idx(m, n)]; }
  std::vector<cplx>& raw() { return c_; }
  const std::vector<cplx>& raw() const { return c_; }

  void enforce_conjugate_symmetry();
  bool check_conjugate_symmetry(double tol = 1e-10) const;

  // pointwise evaluation (direct sum; fine for small N)
  cplx eval(double s, double t) const;

  TorusField derivative_s() const;  // coefficients times i m
  TorusField derivative_t() const;  // coefficients times i n

 private:
  std::size_t idx(int m, int n) const;
  int N_ = 0;
  bool real_ = false;
  std::vector<cplx> c_;
};

// Collocation transforms between coefficients and an M x M node grid,
// s_i = 2 pi i / M (rows), t_j = 2 pi j / M (columns); M a power of two
// with M >= 2(2N+1) for alias-free quadratic products.
std::size_t collocation_size(int N);
std::vector<cplx> to_grid(const TorusField& f, std::size_t M);
TorusField from_grid(const std::vector<cplx>& values, std::size_t M, int N, bool real_flag);

// Real 1-form (or complex 1-form) on the torus: sigma_s ds + sigma_t dt.
struct TorusOneForm {
  TorusField comp_s;
  TorusField comp_t;
  bool antilinear = false;  // tagged complex-antilinear w.r.t. the standard j

  static TorusOneForm antilinear_from_scalar(const TorusField& g);  // g (ds - i dt)
};

// d-bar of a scalar field (Wirtinger (d/ds + i d/dt)/2 in Fourier:
// multiplier (i m - n)/2).
TorusField dbar_scalar(const TorusField& f);

struct DbarSplit {
  TorusField zeta;           // mean-zero solution of dbar zeta = g - g_00
  TorusOneForm harmonic;     // constant (0,1) part from the (0,0) mode
};

// Splits antilinear (0,1) data sigma = g (ds - i dt) into dbar(zeta) plus the
// harmonic remainder; exact in the truncated basis.
DbarSplit dbar_solve_torus(const TorusOneForm& sigma);

// Reconstruction error || sigma - (dbar zeta + harmonic) || in coefficients.
double dbar_reconstruction_error(const TorusOneForm& sigma, const DbarSplit& split);

// ---------------------------------------------------------------------------
// Hodge representatives

// Pointwise 2x2 structure samples on the collocation grid (row-major, M x M).
using StructureField = std::vector<Mat2>;

StructureField standard_structure(std::size_t M);
double structure_distance_to_standard(const StructureField& j);

// Unique 1-form c1 ds + c2 dt + d eps with d(gamma o j) = 0 (truncated
// Galerkin) and normalized cycle periods (1/2pi) oint gamma = class_vector.
// Throws on non-convergence / rank failure for large perturbations.
TorusOneForm hodge_representative(const std::array<double, 2>& class_vector,
                                  const StructureField& j, int N);

// (1/2pi) integrals of gamma over the two fundamental cycles.
std::array<double, 2> cycle_periods(const TorusOneForm& gamma);

// sup-norm residuals of closedness and j-co-closedness on the grid, measured
// on the retained Fourier modes.
struct HarmonicityResidual {
  double d_gamma = 0.0;
  double d_gamma_j = 0.0;
};
HarmonicityResidual harmonicity_residual(const TorusOneForm& gamma, const StructureField& j,
                                         int N);

// ---------------------------------------------------------------------------
// Fredholm data

struct FredholmReport {
  int ker_dim = 0;    // real dimension of ker dbar (complex constants: 2)
  int coker_dim = 0;  // real dimension of the harmonic complement (2g = 2)
  int index = 0;      // ker - coker = 2 - 2g
  double gap = 0.0;   // smallest nonzero singular value (1/2 for the torus)
};

// Exact Fourier-symbol singular values of the truncated dbar operator.
FredholmReport fredholm_index_report(int N);

// Near-null dimension of dbar + pi_1 L for a pointwise zero-order term
// L zeta = w * Im(zeta) (pi_1 kills the constant (0,1) mode). Returns the
// singular values sorted ascending.
std::vector<double> perturbed_dbar_singular_values(int N, const TorusField& w_field);

// ---------------------------------------------------------------------------
// linearized operator

// Pointwise zero-order term acting through the imaginary part only.
struct ZeroOrderOp {
  std::optional<TorusField> w;  // empty = zero operator

  // (0,1) scalar output at collocation nodes
  std::vector<cplx> apply(const std::vector<cplx>& zeta_nodes, std::size_t M) const;
};

// dbar zeta + Psi(class) + L zeta at the standard structure, as an
// antilinear one-form. Psi(c1, c2) = (c1 + i c2)(ds - i dt).
TorusOneForm linearized_cr_apply(const TorusField& zeta, const std::array<double, 2>& cls,
                                 const ZeroOrderOp& L);

// ---------------------------------------------------------------------------
// the model CR solver

// j_dependence: chart structure as a function of (s, t, f-value); must square
// to -identity for every admissible f.
using StructureHandle = std::function<Mat2(double s, double t, double f)>;

// Pointwise right-hand data: the pulled-back form and the exact 1-form da0,
// both sampled on the collocation grid (real components).
struct RhsData {
  std::vector<double> lam_s, lam_t;  // u0* lambda
  std::vector<double> da0_s, da0_t;  // d a0
  std::size_t M = 0;

  static RhsData zero(std::size_t M);
};

struct CRSolution {
  TorusField zeta;       // b + i f
  TorusOneForm gamma;    // c1 ds + c2 dt + d eps, harmonic for the solved j_f
  std::array<double, 2> gamma_class{0.0, 0.0};
  double residual = 0.0;            // l2 of the projected equation residual
  double harmonic_residual = 0.0;   // l2 of the projected co-closedness rows
  int newton_iterations = 0;
  std::vector<double> residual_history;
};

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 25;
  double f_mean_target = 0.0;  // gauge pin for Im zeta_00 (b-mean pinned to 0)
  int N = 4;
};

// Newton solve of the model equation
//   (d zeta + i d zeta o j_f) = u0*lam o j_f - i u0*lam - (d a0 + i d a0 o j_f)
//                               - gamma - i (gamma o j_f)
// with gamma = c1 ds + c2 dt + d eps unknown and d(gamma o j_f) = 0 enforced;
// gauge: mean(Re zeta) = 0, mean(Im zeta) = f_mean_target.
CRSolution newton_solve_model(const RhsData& rhs, const StructureHandle& j_dep,
                              const CRSolution* init, const NewtonOptions& opts);

// Manufactured problem: prescribed smooth solution plus the data that makes
// it exact at the collocation nodes.
struct ManufacturedProblem {
  RhsData rhs;
  StructureHandle j_dep;
  CRSolution truth;
  NewtonOptions opts;
};
ManufacturedProblem make_manufactured_problem(std::uint64_t seed, int N = 4,
                                              double amplitude = 0.12);

// ---------------------------------------------------------------------------
// diagnostics

struct L2BoundReport {
  double gamma_norm = 0.0;
  double rhs_norm = 0.0;
  bool satisfied = false;
};

// || gamma ||_{L2, j} <= || u0*lambda ||_{L2, j} with
// || sigma || = (int sigma o j ^ sigma)^{1/2} by grid quadrature.
L2BoundReport l2_bound_check(const CRSolution& sol, const RhsData& rhs,
                             const StructureHandle& j_dep);

struct MonotonicityReport {
  bool monotone = false;
  bool bound_satisfied = false;
  double worst_margin = 0.0;   // min over nodes/pairs of f_{k+1} - f_k
  double sup_norm = 0.0;       // max over the family of ||f||_inf
};

// Pointwise strict monotonicity of an ordered family of f-grids plus the
// sup bound against a return-time constant.
MonotonicityReport family_monotonicity_check(const std::vector<std::vector<double>>& f_family,
                                             double T_return);

// Interior gradient bound for near-harmonic chart restrictions:
// sup_{B'} |grad h| <= (2 / (rho - rho')) sup_B |h| on concentric disks.
struct GradientBoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
};
GradientBoundReport harmonic_gradient_bound_check(const std::vector<double>& h, std::size_t M,
                                                  double cs, double ct, double rho,
                                                  double rho_inner);

}  // namespace reeblab
