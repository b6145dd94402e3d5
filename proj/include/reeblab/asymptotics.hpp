#pragma once

#include <vector>

#include "reeblab/numerics.hpp"

namespace reeblab {

// R^2-valued loop sampled at t_j = 2 pi j / N, stored as complex x + i y.
struct LoopField {
  std::vector<cplx> values;

  std::size_t size() const { return values.size(); }
  void check() const;  // N >= 8 and even
};

// Rectangular samples of an R^2-valued map on [s0, s1] x S^1.
struct HalfCylinderField {
  std::vector<double> s_grid;             // strictly increasing rows
  std::size_t n_t = 0;                    // columns, t_j = 2 pi j / n_t
  std::vector<std::vector<cplx>> values;  // values[row][col]

  void check() const;
};

// -J0 h' + kappa h with spectral differentiation (J0 = i on R^2 = C, modes
// m in [-N/2, N/2)).
LoopField asymptotic_apply(double kappa, const LoopField& h);

// Eigenvalues of the 2N x 2N real spectral discretization, clustered into
// (value, multiplicity) pairs; returns the n_eigs clusters nearest kappa,
// sorted ascending.
struct EigenCluster {
  double value = 0.0;
  int multiplicity = 0;
};
std::vector<EigenCluster> spectrum(double kappa, int N, int n_eigs, double cluster_tol = 1e-6);

// Winding number of a nonvanishing loop by accumulated angle increments;
// consecutive samples subtending >= pi/2 trigger midpoint refinement.
int circle_degree(const LoopField& loop);

// Exponential-fit data of a difference field U - V on the half-cylinder:
//   lambda_hat:     log-linear slope of row L2 norms over the trimmed
//                   last half of the grid
//   e_loop:         limit row rescaled by e^{-lambda_hat s}
//   winding:        degree of e_loop
//   remainder_rate: decay rate d of || diff e^{-lambda s} - e || ~ M e^{-d s}
struct RelAsymptotics {
  double lambda_hat = 0.0;
  int winding = 0;
  LoopField e_loop;
  double remainder_rate = 0.0;
};
RelAsymptotics relative_asymptotics_fit(const HalfCylinderField& diff);

// Degree bookkeeping between two rows: boundary degrees plus the orders of
// interior zeros (small-circle degrees around detected zeros).
struct ZeroCountReport {
  int deg_lo = 0;
  int deg_hi = 0;
  int zero_order_sum = 0;
  bool consistent = false;
  std::vector<std::pair<double, double>> zeros;  // (s, t) locations
};
ZeroCountReport zero_count_check(const HalfCylinderField& field, double s_lo, double s_hi);

}  // namespace reeblab
