#include "scc/lasso.hpp"

#include <algorithm>
#include <cmath>

namespace scc {

namespace {

void check_dims(const Dictionary& dict, const SparseCode& z, const Eigen::Ref<const Vector>& x,
                const CDWorkspace& ws) {
  if (x.size() != dict.dim() || z.dim() != dict.size() || ws.residual.size() != dict.dim())
    throw Error(ErrorCode::DimensionMismatch, "coordinate descent operands disagree in dimension");
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::ConfigInvalid, "lambda must be positive");
}

// One full sweep on a dense code; returns the largest coordinate change.
double sweep_dense(const Matrix& atoms, Vector& z, Vector& r, double lambda) {
  double max_change = 0.0;
  for (Index j = 0; j < atoms.cols(); ++j) {
    const double old = z[j];
    const double b = atoms.col(j).dot(r) + old;
    const double updated = soft_threshold(b, lambda);
    if (updated != old) {
      r.noalias() -= (updated - old) * atoms.col(j);
      z[j] = updated;
      max_change = std::max(max_change, std::abs(updated - old));
    }
  }
  return max_change;
}

double lasso_value(const Matrix& atoms, const Vector& z, const Eigen::Ref<const Vector>& x, double lambda) {
  return 0.5 * (atoms * z - x).squaredNorm() + lambda * z.lpNorm<1>();
}

// Largest violation of the lasso optimality conditions at z: the correlation
// d_j^T (x - Dz) must equal lambda sign(z_j) on the support and stay within
// [-lambda, lambda] off it.
double kkt_violation(const Matrix& atoms, const Vector& z, const Eigen::Ref<const Vector>& x, double lambda) {
  const Vector corr = atoms.transpose() * (x - atoms * z);
  double worst = 0.0;
  for (Index j = 0; j < z.size(); ++j) {
    const double v = z[j] != 0.0 ? std::abs(corr[j] - std::copysign(lambda, z[j]))
                                 : std::max(std::abs(corr[j]) - lambda, 0.0);
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

CDResult cd_full_cycle(const Dictionary& dict, const SparseCode& z, const Eigen::Ref<const Vector>& x,
                       CDWorkspace& ws, double lambda) {
  check_dims(dict, z, x, ws);
  check_lambda(lambda);
  if (ws.dense_code.size() != dict.size()) ws.dense_code.resize(dict.size());
  ws.dense_code.setZero();
  for (const auto& e : z.entries()) ws.dense_code[e.index] = e.value;

  sweep_dense(dict.atoms(), ws.dense_code, ws.residual, lambda);

  CDResult out;
  out.code = SparseCode::from_dense(ws.dense_code);
  out.residual = ws.residual;
  out.cycles_run = 1;
  return out;
}

CDResult cd_support_cycle(const Dictionary& dict, const SparseCode& z, const Eigen::Ref<const Vector>& x,
                          CDWorkspace& ws, double lambda) {
  check_dims(dict, z, x, ws);
  check_lambda(lambda);
  std::vector<SparseCode::Entry> kept;
  kept.reserve(z.support_size());
  for (const auto& e : z.entries()) {
    const auto atom = dict.atom(e.index);
    const double b = atom.dot(ws.residual) + e.value;
    const double updated = soft_threshold(b, lambda);
    if (updated != e.value) ws.residual.noalias() -= (updated - e.value) * atom;
    if (updated != 0.0) kept.push_back({e.index, updated});
  }
  CDResult out;
  out.code = SparseCode::from_sorted_unchecked(z.dim(), std::move(kept));
  out.residual = ws.residual;
  out.cycles_run = 1;
  return out;
}

CDResult encode_scc(const Dictionary& dict, const SparseCode& z_init, const Eigen::Ref<const Vector>& x,
                    double lambda, int steps, int full_cycles, CDWorkspace& ws) {
  if (steps < 1) throw Error(ErrorCode::ConfigInvalid, "encode requires at least one step");
  if (full_cycles < 1 || full_cycles > steps)
    throw Error(ErrorCode::ConfigInvalid, "full_cycles must lie in [1, steps]");
  ws.reset(dict, z_init, x);
  CDResult res;
  res.code = z_init;
  for (int s = 0; s < steps; ++s) {
    CDResult next = s < full_cycles ? cd_full_cycle(dict, res.code, x, ws, lambda)
                                    : cd_support_cycle(dict, res.code, x, ws, lambda);
    res.code = std::move(next.code);
  }
  res.residual = ws.residual;
  res.cycles_run = steps;
  return res;
}

CDResult encode_scc(const Dictionary& dict, const SparseCode& z_init, const Eigen::Ref<const Vector>& x,
                    double lambda, int steps, int full_cycles) {
  CDWorkspace ws(dict.dim(), dict.size());
  return encode_scc(dict, z_init, x, lambda, steps, full_cycles, ws);
}

SparseCode lasso_oracle_cd(const Dictionary& dict, const Eigen::Ref<const Vector>& x, double lambda, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::ConfigInvalid, "tol must be positive");
  check_lambda(lambda);
  if (x.size() != dict.dim()) throw Error(ErrorCode::DimensionMismatch, "sample dimension differs from dictionary");
  Vector z = Vector::Zero(dict.size());
  Vector r = x;
  for (int it = 0; it < kOracleMaxIterations; ++it) {
    if (sweep_dense(dict.atoms(), z, r, lambda) < tol) return SparseCode::from_dense(z);
  }
  throw Error(ErrorCode::MaxIterationsExceeded, "coordinate-descent oracle did not converge");
}

double largest_gram_eigenvalue(const Matrix& atoms, double tol, int max_iter) {
  const Index m = atoms.cols();
  if (m == 0 || atoms.rows() == 0) return 0.0;
  // Deterministic start with no exact orthogonality to typical eigenvectors.
  Vector v(m);
  for (Index j = 0; j < m; ++j) v[j] = 1.0 + 0.01 * static_cast<double>(j % 7);
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = atoms.transpose() * (atoms * v);
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (std::abs(next - estimate) <= tol * std::max(1.0, std::abs(next))) return std::max(next, norm);
    estimate = next;
  }
  return estimate;
}

SparseCode lasso_oracle_prox(const Dictionary& dict, const Eigen::Ref<const Vector>& x, double lambda, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::ConfigInvalid, "tol must be positive");
  check_lambda(lambda);
  if (x.size() != dict.dim()) throw Error(ErrorCode::DimensionMismatch, "sample dimension differs from dictionary");
  const Matrix& D = dict.atoms();
  const Index m = dict.size();
  const double lipschitz = largest_gram_eigenvalue(D);
  if (lipschitz == 0.0) return SparseCode(m);
  const double step = 1.0 / lipschitz;

  Vector z = Vector::Zero(m);
  Vector y = z;
  Vector z_prev(m);
  double t = 1.0;
  double f_prev = lasso_value(D, z, x, lambda);
  for (int it = 0; it < kOracleMaxIterations; ++it) {
    z_prev = z;
    const Vector grad = D.transpose() * (D * y - x);
    z = y - step * grad;
    for (Index j = 0; j < m; ++j) z[j] = soft_threshold(z[j], step * lambda);
    const double f = lasso_value(D, z, x, lambda);
    if (f > f_prev && t > 1.0) {
      // Momentum overshoot: restart from the last iterate with a plain step.
      t = 1.0;
      y = z_prev;
      z = z_prev;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = z + ((t - 1.0) / t_next) * (z - z_prev);
    t = t_next;
    f_prev = f;
    if (kkt_violation(D, z, x, lambda) < tol) return SparseCode::from_dense(z, kPruneThreshold);
  }
  throw Error(ErrorCode::MaxIterationsExceeded, "proximal-gradient oracle did not converge");
}

}  // namespace scc
