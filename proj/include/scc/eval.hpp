#pragma once

#include "scc/core.hpp"

#include <map>

namespace scc {

// 1/2 ||Dz - x||^2 + lambda ||z||_1
double sample_objective(const Dictionary& dict, const SparseCode& z, const Eigen::Ref<const Vector>& x,
                        double lambda);

// Mean of sample_objective over the data set. Per-sample terms are evaluated
// in parallel and reduced with pairwise summation, so the result does not
// depend on the worker count.
double objective(const Dictionary& dict, const std::vector<SparseCode>& codes, const DataSet& ds, double lambda);

// Pairwise (cascade) sum.
double pairwise_sum(std::span<const double> values);

struct SparsityStats {
  double mean_support = 0.0;
  std::size_t max_support = 0;
  std::map<std::size_t, std::size_t> histogram;  // support size -> count
};

SparsityStats sparsity_stats(const std::vector<SparseCode>& codes);

// out[j] = max_i |z_i[j]|
Vector max_pool(std::span<const SparseCode> codes);

// Pools consecutive groups; `boundaries` lists the start index of each group
// (first entry 0, strictly increasing, all < codes.size()).
std::vector<Vector> max_pool_groups(const std::vector<SparseCode>& codes, const std::vector<std::size_t>& boundaries);

}  // namespace scc
