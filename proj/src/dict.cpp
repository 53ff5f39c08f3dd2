#include "scc/dict.hpp"

namespace scc {

Vector project_unit_ball(const Eigen::Ref<const Vector>& d) {
  const double norm = d.norm();
  if (norm > 1.0) return d / norm;
  return d;
}

HessianDiag hessian_accumulate(HessianDiag H, const SparseCode& z) {
  H.accumulate(z);
  return H;
}

double learning_rate(const HessianDiag& H, Index j) { return H.rate(j); }

namespace {

void check_sgd_dims(const Dictionary& dict, const SparseCode& z, const Eigen::Ref<const Vector>& residual_neg) {
  if (z.dim() != dict.size() || residual_neg.size() != dict.dim())
    throw Error(ErrorCode::DimensionMismatch, "dictionary update operands disagree in dimension");
}

template <class RateFn>
void sweep_support(Dictionary& dict, const SparseCode& z, const Eigen::Ref<const Vector>& residual_neg,
                   RateFn&& rate_of) {
  Vector column(dict.dim());
  for (const auto& e : z.entries()) {
    const double rate = rate_of(e.index);
    column.noalias() = dict.atom(e.index) - (rate * e.value) * residual_neg;
    dict.set_atom(e.index, column);
  }
}

}  // namespace

void sgd_update_support_inplace(Dictionary& dict, const SparseCode& z, const Eigen::Ref<const Vector>& residual_neg,
                                const HessianDiag& H) {
  check_sgd_dims(dict, z, residual_neg);
  if (H.dim() != dict.size()) throw Error(ErrorCode::DimensionMismatch, "Hessian size differs from atom count");
  // Resolve every rate first so a ZeroCurvature error leaves D untouched.
  for (const auto& e : z.entries()) (void)H.rate(e.index);
  sweep_support(dict, z, residual_neg, [&](Index j) { return H.diag()[j] > 0.0 ? 1.0 / H.diag()[j] : 0.0; });
}

void sgd_update_support_inplace(Dictionary& dict, const SparseCode& z, const Eigen::Ref<const Vector>& residual_neg,
                                double rate) {
  check_sgd_dims(dict, z, residual_neg);
  sweep_support(dict, z, residual_neg, [rate](Index) { return rate; });
}

Dictionary sgd_update_support(Dictionary dict, const SparseCode& z, const Eigen::Ref<const Vector>& residual_neg,
                              const HessianDiag& H) {
  sgd_update_support_inplace(dict, z, residual_neg, H);
  return dict;
}

Matrix full_gradient(const Dictionary& dict, const Matrix& codes_dense, const Matrix& data) {
  if (codes_dense.rows() != dict.size() || data.rows() != dict.dim() || codes_dense.cols() != data.cols())
    throw Error(ErrorCode::DimensionMismatch, "full gradient operands disagree in dimension");
  const double n = static_cast<double>(data.cols());
  Matrix residual = dict.atoms() * codes_dense - data;
  return (residual * codes_dense.transpose()) / n;
}

Dictionary full_gradient_step(const Dictionary& dict, const std::vector<SparseCode>& codes, const DataSet& ds,
                              double eta) {
  if (codes.size() != ds.size()) throw Error(ErrorCode::DimensionMismatch, "one code per sample is required");
  if (!(eta > 0.0)) throw Error(ErrorCode::ConfigInvalid, "eta must be positive");
  Matrix Z(dict.size(), static_cast<Index>(codes.size()));
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (codes[i].dim() != dict.size()) throw Error(ErrorCode::DimensionMismatch, "code dimension differs from atom count");
    Z.col(static_cast<Index>(i)) = codes[i].to_dense();
  }
  const Matrix X = ds.to_matrix();
  const Matrix grad = full_gradient(dict, Z, X);
  return Dictionary::projected(dict.atoms() - eta * grad);
}

}  // namespace scc
