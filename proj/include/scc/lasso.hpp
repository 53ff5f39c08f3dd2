#pragma once

// Sparse-code updates for min_z 1/2 ||Dz - x||^2 + lambda ||z||_1.
//
// Coordinate j is updated with
//   b_j = d_j^T r + z_j,   z_j <- soft_threshold(b_j, lambda),
//   r   <- r - d_j (z_j_new - z_j_old),
// where r = x - Dz is carried in the workspace. For unit-norm atoms this is
// the exact coordinate minimizer; for atoms strictly inside the unit ball it
// is a proximal step with step size 1 <= 1/||d_j||^2, which still cannot
// increase the objective.

#include "scc/core.hpp"

namespace scc {

struct CDResult {
  SparseCode code;
  Vector residual;  // x - D * code
  int cycles_run = 0;
};

// h_lambda(v): v + lambda below -lambda, v - lambda above lambda, 0 in
// between (inclusive).
inline double soft_threshold(double v, double lambda) {
  if (v > lambda) return v - lambda;
  if (v < -lambda) return v + lambda;
  return 0.0;
}

// One ascending sweep over all m coordinates. ws.residual must equal x - Dz
// on entry; it equals x - D * result.code on exit.
CDResult cd_full_cycle(const Dictionary& dict, const SparseCode& z, const Eigen::Ref<const Vector>& x,
                       CDWorkspace& ws, double lambda);

// As cd_full_cycle but only over a snapshot of supp(z). Coordinates may
// leave the support; none may enter.
CDResult cd_support_cycle(const Dictionary& dict, const SparseCode& z, const Eigen::Ref<const Vector>& x,
                          CDWorkspace& ws, double lambda);

// Residual from scratch, then `full_cycles` full sweeps followed by
// steps - full_cycles support sweeps. cycles_run == steps.
CDResult encode_scc(const Dictionary& dict, const SparseCode& z_init, const Eigen::Ref<const Vector>& x,
                    double lambda, int steps, int full_cycles = 1);

// Same as above, reusing the caller's workspace.
CDResult encode_scc(const Dictionary& dict, const SparseCode& z_init, const Eigen::Ref<const Vector>& x,
                    double lambda, int steps, int full_cycles, CDWorkspace& ws);

inline constexpr int kOracleMaxIterations = 100000;

// Full cycles from z = 0 until the largest coordinate change is < tol.
SparseCode lasso_oracle_cd(const Dictionary& dict, const Eigen::Ref<const Vector>& x, double lambda, double tol);

// FISTA with step 1/L, L = largest eigenvalue of D^T D by power iteration,
// and momentum restart whenever the objective rises. Stops once the largest
// violation of the optimality conditions is < tol. Entries with magnitude
// <= 1e-12 are pruned.
SparseCode lasso_oracle_prox(const Dictionary& dict, const Eigen::Ref<const Vector>& x, double lambda, double tol);

// Largest eigenvalue of D^T D (squared spectral norm of D).
double largest_gram_eigenvalue(const Matrix& atoms, double tol = 1e-14, int max_iter = 10000);

}  // namespace scc
