#include "scc/eval.hpp"

#include <algorithm>
#include <cmath>

namespace scc {

double sample_objective(const Dictionary& dict, const SparseCode& z, const Eigen::Ref<const Vector>& x,
                        double lambda) {
  if (x.size() != dict.dim() || z.dim() != dict.size())
    throw Error(ErrorCode::DimensionMismatch, "objective operands disagree in dimension");
  Vector r = -x;
  for (const auto& e : z.entries()) r.noalias() += e.value * dict.atom(e.index);
  return 0.5 * r.squaredNorm() + lambda * z.l1_norm();
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 8;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double objective(const Dictionary& dict, const std::vector<SparseCode>& codes, const DataSet& ds, double lambda) {
  if (codes.size() != ds.size()) throw Error(ErrorCode::DimensionMismatch, "one code per sample is required");
  if (ds.size() == 0) throw Error(ErrorCode::Empty, "objective of an empty data set");
  std::vector<double> terms(ds.size());
  parallel_for(ds.size(), [&](std::size_t i) { terms[i] = sample_objective(dict, codes[i], ds[i], lambda); });
  return pairwise_sum(terms) / static_cast<double>(ds.size());
}

SparsityStats sparsity_stats(const std::vector<SparseCode>& codes) {
  if (codes.empty()) throw Error(ErrorCode::Empty, "sparsity statistics of an empty collection");
  SparsityStats s;
  std::size_t total = 0;
  for (const auto& z : codes) {
    const std::size_t k = z.support_size();
    total += k;
    s.max_support = std::max(s.max_support, k);
    ++s.histogram[k];
  }
  s.mean_support = static_cast<double>(total) / static_cast<double>(codes.size());
  return s;
}

Vector max_pool(std::span<const SparseCode> codes) {
  if (codes.empty()) throw Error(ErrorCode::Empty, "max pooling over an empty group");
  const Index m = codes.front().dim();
  Vector out = Vector::Zero(m);
  for (const auto& z : codes) {
    if (z.dim() != m) throw Error(ErrorCode::DimensionMismatch, "pooled codes differ in dimension");
    for (const auto& e : z.entries()) out[e.index] = std::max(out[e.index], std::abs(e.value));
  }
  return out;
}

std::vector<Vector> max_pool_groups(const std::vector<SparseCode>& codes, const std::vector<std::size_t>& boundaries) {
  if (codes.empty() || boundaries.empty()) throw Error(ErrorCode::Empty, "max pooling over an empty group");
  if (boundaries.front() != 0) throw Error(ErrorCode::ConfigInvalid, "first group must start at 0");
  std::vector<Vector> pooled;
  pooled.reserve(boundaries.size());
  const std::span<const SparseCode> all(codes);
  for (std::size_t g = 0; g < boundaries.size(); ++g) {
    const std::size_t begin = boundaries[g];
    const std::size_t end = g + 1 < boundaries.size() ? boundaries[g + 1] : codes.size();
    if (begin >= end || end > codes.size())
      throw Error(ErrorCode::ConfigInvalid, "group boundaries must be strictly increasing and in range");
    pooled.push_back(max_pool(all.subspan(begin, end - begin)));
  }
  return pooled;
}

}  // namespace scc
