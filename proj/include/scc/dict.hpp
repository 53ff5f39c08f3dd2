#pragma once

// Dictionary-side updates: unit-ball projection, Hessian-diagonal learning
// rates, the support-restricted stochastic step and the full-batch step.

#include "scc/core.hpp"

namespace scc {

// d if ||d|| <= 1, else d / ||d||.
Vector project_unit_ball(const Eigen::Ref<const Vector>& d);

// Returns a copy of H with h_jj += z_j^2 on supp(z).
HessianDiag hessian_accumulate(HessianDiag H, const SparseCode& z);

// 1 / h_jj. Throws ZeroCurvature.
double learning_rate(const HessianDiag& H, Index j);

// For each j in supp(z), ascending:
//   d_j <- P(d_j - rate_j * z_j * residual_neg)
// with residual_neg = Dz - x evaluated once at the incoming dictionary.
// Columns off the support are not written.
void sgd_update_support_inplace(Dictionary& dict, const SparseCode& z,
                                const Eigen::Ref<const Vector>& residual_neg, const HessianDiag& H);

// Same sweep with one scalar rate for every touched column.
void sgd_update_support_inplace(Dictionary& dict, const SparseCode& z,
                                const Eigen::Ref<const Vector>& residual_neg, double rate);

Dictionary sgd_update_support(Dictionary dict, const SparseCode& z,
                              const Eigen::Ref<const Vector>& residual_neg, const HessianDiag& H);

// Averaged reconstruction gradient (1/n) (DZ - X) Z^T, formed with dense
// products over all m columns.
Matrix full_gradient(const Dictionary& dict, const Matrix& codes_dense, const Matrix& data);

// D <- P(D - eta * (1/n) sum_i (D z_i - x_i) z_i^T), every column projected.
Dictionary full_gradient_step(const Dictionary& dict, const std::vector<SparseCode>& codes, const DataSet& ds,
                              double eta);

}  // namespace scc
