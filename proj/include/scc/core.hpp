#pragma once

// Domain types shared by every module: samples, data sets, dictionaries,
// sparse codes, the Hessian diagonal, configuration, per-epoch statistics,
// the coordinate-descent workspace, and the seeded random-number contract.

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace scc {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;  // column-major

enum class ErrorCode {
  DimensionMismatch,
  NonFinite,
  Empty,
  MaxIterationsExceeded,
  ZeroCurvature,
  ConfigInvalid,
  ImageTooSmall,
  DegenerateSample,
  BadMagic,
  Truncated,
  Io,
  InfeasibleDictionary,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Tolerance on column norms for membership in the unit-ball feasible set.
inline constexpr double kUnitBallSlack = 1e-12;
// Magnitude below which dense intermediates are dropped from a SparseCode.
inline constexpr double kPruneThreshold = 1e-12;

struct Sample {
  Vector values;
  bool preprocessed = false;

  Index dim() const { return values.size(); }
};

struct DataSet {
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  Index dim() const { return samples.empty() ? 0 : samples.front().dim(); }
  const Vector& operator[](std::size_t i) const { return samples[i].values; }

  // Packs samples as the columns of a p x n matrix.
  Matrix to_matrix() const;
  static DataSet from_matrix(const Matrix& columns, bool preprocessed = false);
};

// Throws DimensionMismatch / NonFinite / Empty.
void validate_dataset(const DataSet& ds);

// p x m matrix of atoms (columns); every column lies in the unit ball.
class Dictionary {
 public:
  Dictionary() = default;

  // Validates feasibility and finiteness; throws InfeasibleDictionary or
  // NonFinite.
  explicit Dictionary(Matrix atoms);

  // Projects every column onto the unit ball before adopting it.
  static Dictionary projected(Matrix atoms);

  Index dim() const { return atoms_.rows(); }
  Index size() const { return atoms_.cols(); }
  const Matrix& atoms() const { return atoms_; }
  auto atom(Index j) const { return atoms_.col(j); }

  // Replaces column j by the unit-ball projection of `d`.
  void set_atom(Index j, const Eigen::Ref<const Vector>& d);

  bool operator==(const Dictionary& other) const { return atoms_ == other.atoms_; }

 private:
  Matrix atoms_;
};

// Sparse vector stored as (index, value) pairs in strictly ascending index
// order. Only nonzeros are stored.
class SparseCode {
 public:
  struct Entry {
    std::uint32_t index;
    double value;
    bool operator==(const Entry&) const = default;
  };

  SparseCode() = default;
  explicit SparseCode(Index dim) : dim_(dim) {}
  // Validates ordering, range and nonzero-ness of `entries`.
  SparseCode(Index dim, std::vector<Entry> entries);

  // Adopts entries already known to be sorted, in range and nonzero.
  static SparseCode from_sorted_unchecked(Index dim, std::vector<Entry> entries);

  // Drops entries with |v| <= threshold.
  static SparseCode from_dense(const Eigen::Ref<const Vector>& dense,
                               double threshold = 0.0);

  Vector to_dense() const;

  Index dim() const { return dim_; }
  std::size_t support_size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::span<const Entry> entries() const { return entries_; }
  std::vector<std::uint32_t> support() const;

  double value(Index j) const;
  double l1_norm() const;

  // D * z over the support only.
  Vector apply(const Matrix& atoms) const;

  bool operator==(const SparseCode&) const = default;

 private:
  Index dim_ = 0;
  std::vector<Entry> entries_;
};

// Diagonal of the accumulated outer-product matrix sum z z^T.
class HessianDiag {
 public:
  HessianDiag() = default;
  explicit HessianDiag(Index dim) : diag_(Vector::Zero(dim)) {}

  // h_jj += z_j^2 for j in supp(z).
  void accumulate(const SparseCode& z);

  // 1 / h_jj; throws ZeroCurvature when h_jj == 0.
  double rate(Index j) const;

  Index dim() const { return diag_.size(); }
  const Vector& diag() const { return diag_; }

 private:
  Vector diag_;
};

enum class InitMethod { RandomPatches, RandomGaussian };
enum class Ordering { Sequential, Shuffled };

struct AdaptiveRate {};
struct NaturalRate {
  double a = 1.0;
  double b = 0.0;
};
using RateSchedule = std::variant<AdaptiveRate, NaturalRate>;

struct TrainConfig {
  std::optional<double> lambda;  // defaults to 1.2 / sqrt(p)
  int epochs = 10;
  int cd_steps = 3;
  // Leading cycles of each encode that scan every coordinate; the remaining
  // cd_steps - cd_full_cycles cycles are restricted to the support.
  int cd_full_cycles = 1;
  Index dict_size = 0;
  InitMethod init = InitMethod::RandomPatches;
  Ordering ordering = Ordering::Sequential;
  std::uint64_t seed = 0;
  RateSchedule rate_schedule = AdaptiveRate{};

  double resolved_lambda(Index p) const;
  // Throws ConfigInvalid.
  void validate() const;
};

double default_lambda(Index p);

struct EpochStats {
  int epoch = 0;  // 1-based
  double objective = 0.0;
  double time_code_update = 0.0;  // seconds
  double time_dict_update = 0.0;  // seconds
  double mean_support = 0.0;
  std::size_t max_support = 0;
};

// Residual r = x - Dz kept in sync with a code during coordinate descent.
struct CDWorkspace {
  Vector residual;
  Vector scratch;
  Vector dense_code;

  CDWorkspace() = default;
  CDWorkspace(Index p, Index m)
      : residual(Vector::Zero(p)), scratch(Vector::Zero(p)), dense_code(Vector::Zero(m)) {}

  // Sets residual = x - D z.
  void reset(const Dictionary& dict, const SparseCode& z, const Eigen::Ref<const Vector>& x);
};

// ----------------------------------------------------------------------
// Random numbers.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Distributions are implemented here rather than taken from
// <random>, whose distribution algorithms are implementation-defined:
//   uniform01   (u >> 11) * 2^-53
//   below(n)    Lemire multiply-shift with rejection on the 64-bit word
//   normal      Box-Muller, cosine branch only, u1 drawn from (0, 1]
//   shuffle     Fisher-Yates from the back, j = below(i + 1)
// Independent streams are derived from a seed and a stream tag with
// splitmix64.
// ----------------------------------------------------------------------
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  double uniform01();
  std::uint64_t below(std::uint64_t n);
  double normal();

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct values from [0, n) via a partial Fisher-Yates pass.
  std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t k);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Stream tags used by the library.
namespace stream {
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kOrdering = 2;
inline constexpr std::uint64_t kPlantedDict = 3;
inline constexpr std::uint64_t kPlantedCodes = 4;
}  // namespace stream

// Worker count for the parallel encode and objective phases: the
// SCC_THREADS environment variable when set to a positive integer,
// otherwise the hardware concurrency.
unsigned worker_count();

// Runs fn(i) for i in [0, n) across worker_count() threads in contiguous
// blocks. fn must only write to per-index state.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn);

}  // namespace scc

#include "scc/detail/parallel.hpp"
