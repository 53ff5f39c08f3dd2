#include "scc/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <thread>

namespace scc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::MaxIterationsExceeded: return "MaxIterationsExceeded";
    case ErrorCode::ZeroCurvature: return "ZeroCurvature";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::Io: return "Io";
    case ErrorCode::InfeasibleDictionary: return "InfeasibleDictionary";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

// ---------------------------------------------------------------- DataSet

Matrix DataSet::to_matrix() const {
  Matrix out(dim(), static_cast<Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) out.col(static_cast<Index>(i)) = samples[i].values;
  return out;
}

DataSet DataSet::from_matrix(const Matrix& columns, bool preprocessed) {
  DataSet ds;
  ds.samples.reserve(static_cast<std::size_t>(columns.cols()));
  for (Index i = 0; i < columns.cols(); ++i) ds.samples.push_back({columns.col(i), preprocessed});
  return ds;
}

void validate_dataset(const DataSet& ds) {
  if (ds.samples.empty()) throw Error(ErrorCode::Empty, "data set has no samples");
  const Index p = ds.samples.front().dim();
  if (p < 1) throw Error(ErrorCode::DimensionMismatch, "samples must have dimension >= 1");
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Sample& s = ds.samples[i];
    if (s.dim() != p) {
      std::ostringstream msg;
      msg << "sample " << i << " has dimension " << s.dim() << ", expected " << p;
      throw Error(ErrorCode::DimensionMismatch, msg.str());
    }
    if (!s.values.allFinite())
      throw Error(ErrorCode::NonFinite, "sample " + std::to_string(i) + " has a non-finite entry");
    if (s.preprocessed) {
      const double mean = s.values.mean();
      const double norm = s.values.norm();
      if (std::abs(mean) > 1e-9 || std::abs(norm - 1.0) > 1e-9)
        throw Error(ErrorCode::DegenerateSample,
                    "sample " + std::to_string(i) + " is flagged preprocessed but is not zero-mean unit-norm");
    }
  }
}

// ------------------------------------------------------------- Dictionary

Dictionary::Dictionary(Matrix atoms) : atoms_(std::move(atoms)) {
  if (!atoms_.allFinite()) throw Error(ErrorCode::NonFinite, "dictionary has a non-finite entry");
  for (Index j = 0; j < atoms_.cols(); ++j) {
    if (atoms_.col(j).norm() > 1.0 + kUnitBallSlack)
      throw Error(ErrorCode::InfeasibleDictionary,
                  "atom " + std::to_string(j) + " lies outside the unit ball");
  }
}

Dictionary Dictionary::projected(Matrix atoms) {
  if (!atoms.allFinite()) throw Error(ErrorCode::NonFinite, "dictionary has a non-finite entry");
  for (Index j = 0; j < atoms.cols(); ++j) {
    const double norm = atoms.col(j).norm();
    if (norm > 1.0) atoms.col(j) /= norm;
  }
  return Dictionary(std::move(atoms));
}

void Dictionary::set_atom(Index j, const Eigen::Ref<const Vector>& d) {
  if (d.size() != atoms_.rows())
    throw Error(ErrorCode::DimensionMismatch, "atom length differs from dictionary dimension");
  const double norm = d.norm();
  if (norm > 1.0)
    atoms_.col(j) = d / norm;
  else
    atoms_.col(j) = d;
}

// ------------------------------------------------------------- SparseCode

SparseCode::SparseCode(Index dim, std::vector<Entry> entries) : dim_(dim), entries_(std::move(entries)) {
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const Entry& e = entries_[k];
    if (static_cast<Index>(e.index) >= dim_)
      throw Error(ErrorCode::DimensionMismatch, "code index out of range");
    if (k > 0 && entries_[k - 1].index >= e.index)
      throw Error(ErrorCode::ConfigInvalid, "code indices must be strictly increasing");
    if (e.value == 0.0) throw Error(ErrorCode::ConfigInvalid, "code stores an explicit zero");
    if (!std::isfinite(e.value)) throw Error(ErrorCode::NonFinite, "code value is not finite");
  }
}

SparseCode SparseCode::from_sorted_unchecked(Index dim, std::vector<Entry> entries) {
  SparseCode z(dim);
  z.entries_ = std::move(entries);
  return z;
}

SparseCode SparseCode::from_dense(const Eigen::Ref<const Vector>& dense, double threshold) {
  SparseCode z(dense.size());
  for (Index j = 0; j < dense.size(); ++j) {
    const double v = dense[j];
    if (v != 0.0 && std::abs(v) > threshold) z.entries_.push_back({static_cast<std::uint32_t>(j), v});
  }
  return z;
}

Vector SparseCode::to_dense() const {
  Vector out = Vector::Zero(dim_);
  for (const Entry& e : entries_) out[e.index] = e.value;
  return out;
}

std::vector<std::uint32_t> SparseCode::support() const {
  std::vector<std::uint32_t> out;
  out.reserve(entries_.size());
  for (const Entry& e : entries_) out.push_back(e.index);
  return out;
}

double SparseCode::value(Index j) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), j,
                             [](const Entry& e, Index idx) { return static_cast<Index>(e.index) < idx; });
  return (it != entries_.end() && static_cast<Index>(it->index) == j) ? it->value : 0.0;
}

double SparseCode::l1_norm() const {
  double s = 0.0;
  for (const Entry& e : entries_) s += std::abs(e.value);
  return s;
}

Vector SparseCode::apply(const Matrix& atoms) const {
  if (atoms.cols() != dim_) throw Error(ErrorCode::DimensionMismatch, "code dimension differs from atom count");
  Vector out = Vector::Zero(atoms.rows());
  for (const Entry& e : entries_) out.noalias() += e.value * atoms.col(e.index);
  return out;
}

// ------------------------------------------------------------ HessianDiag

void HessianDiag::accumulate(const SparseCode& z) {
  if (z.dim() != diag_.size()) throw Error(ErrorCode::DimensionMismatch, "code dimension differs from Hessian size");
  for (const auto& e : z.entries()) diag_[e.index] += e.value * e.value;
}

double HessianDiag::rate(Index j) const {
  if (j < 0 || j >= diag_.size()) throw Error(ErrorCode::DimensionMismatch, "Hessian index out of range");
  const double h = diag_[j];
  if (h <= 0.0) throw Error(ErrorCode::ZeroCurvature, "h_jj is zero for atom " + std::to_string(j));
  return 1.0 / h;
}

// ------------------------------------------------------------ TrainConfig

double default_lambda(Index p) { return 1.2 / std::sqrt(static_cast<double>(p)); }

double TrainConfig::resolved_lambda(Index p) const { return lambda ? *lambda : default_lambda(p); }

void TrainConfig::validate() const {
  if (lambda && !(*lambda > 0.0 && std::isfinite(*lambda)))
    throw Error(ErrorCode::ConfigInvalid, "lambda must be positive");
  if (epochs < 1) throw Error(ErrorCode::ConfigInvalid, "epochs must be >= 1");
  if (cd_steps < 1) throw Error(ErrorCode::ConfigInvalid, "cd_steps must be >= 1");
  if (cd_full_cycles < 1 || cd_full_cycles > cd_steps)
    throw Error(ErrorCode::ConfigInvalid, "cd_full_cycles must lie in [1, cd_steps]");
  if (dict_size < 1) throw Error(ErrorCode::ConfigInvalid, "dict_size must be >= 1");
  if (const auto* nat = std::get_if<NaturalRate>(&rate_schedule)) {
    if (!(nat->a > 0.0)) throw Error(ErrorCode::ConfigInvalid, "natural rate requires a > 0");
    if (!(nat->b >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "natural rate requires b >= 0");
  }
}

// ------------------------------------------------------------ CDWorkspace

void CDWorkspace::reset(const Dictionary& dict, const SparseCode& z, const Eigen::Ref<const Vector>& x) {
  if (x.size() != dict.dim() || z.dim() != dict.size())
    throw Error(ErrorCode::DimensionMismatch, "workspace reset with mismatched dimensions");
  residual = x;
  for (const auto& e : z.entries()) residual.noalias() -= e.value * dict.atom(e.index);
  if (scratch.size() != x.size()) scratch = Vector::Zero(x.size());
  if (dense_code.size() != dict.size()) dense_code = Vector::Zero(dict.size());
}

// -------------------------------------------------------------------- Rng

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : engine_(splitmix64(seed ^ splitmix64(stream))) {}

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::ConfigInvalid, "below(0)");
  unsigned __int128 product = static_cast<unsigned __int128>(engine_()) * n;
  auto low = static_cast<std::uint64_t>(product);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(engine_()) * n;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

double Rng::normal() {
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::uint32_t> Rng::sample_without_replacement(std::uint32_t n, std::uint32_t k) {
  if (k > n) throw Error(ErrorCode::ConfigInvalid, "cannot draw more distinct values than the range holds");
  std::vector<std::uint32_t> pool(n);
  for (std::uint32_t i = 0; i < n; ++i) pool[i] = i;
  for (std::uint32_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::uint32_t>(below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

unsigned worker_count() {
  if (const char* env = std::getenv("SCC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace scc
