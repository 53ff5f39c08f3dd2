#include "scc/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace scc {

// ------------------------------------------------------------- patches

DataSet extract_patches(const GrayImage& image, Index window, Index stride, double std_threshold) {
  if (window < 1 || stride < 1) throw Error(ErrorCode::ConfigInvalid, "window and stride must be >= 1");
  if (image.width < window || image.height < window)
    throw Error(ErrorCode::ImageTooSmall, "image is smaller than the patch window");
  if (static_cast<Index>(image.pixels.size()) != image.width * image.height)
    throw Error(ErrorCode::DimensionMismatch, "pixel buffer does not match image size");

  DataSet ds;
  const Index p = window * window;
  Vector patch(p);
  for (Index top = 0; top + window <= image.height; top += stride) {
    for (Index left = 0; left + window <= image.width; left += stride) {
      for (Index r = 0; r < window; ++r)
        for (Index c = 0; c < window; ++c) patch[r * window + c] = image.at(top + r, left + c);
      const double mean = patch.mean();
      const double stddev = std::sqrt((patch.array() - mean).square().mean());
      if (stddev < std_threshold) continue;
      ds.samples.push_back({patch, false});
    }
  }
  return ds;
}

Sample preprocess(const Sample& s) {
  if (s.dim() < 1) throw Error(ErrorCode::DegenerateSample, "empty sample");
  Vector centred = s.values.array() - s.values.mean();
  const double norm = centred.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw Error(ErrorCode::DegenerateSample, "sample has zero variance");
  return {centred / norm, true};
}

DataSet preprocess(const DataSet& ds) {
  DataSet out;
  out.samples.reserve(ds.size());
  for (const auto& s : ds.samples) out.samples.push_back(preprocess(s));
  return out;
}

// ---------------------------------------------------------------- init

Dictionary init_dictionary(const DataSet& ds, Index m, InitMethod method, std::uint64_t seed) {
  if (ds.size() == 0) throw Error(ErrorCode::Empty, "cannot initialize a dictionary from no samples");
  if (m < 1) throw Error(ErrorCode::ConfigInvalid, "dictionary size must be >= 1");
  const Index p = ds.dim();
  Rng rng(seed, stream::kInit);
  Matrix atoms(p, m);
  switch (method) {
    case InitMethod::RandomPatches: {
      const auto n = static_cast<std::uint32_t>(ds.size());
      std::vector<std::uint32_t> picks;
      if (static_cast<std::uint64_t>(m) <= n) {
        picks = rng.sample_without_replacement(n, static_cast<std::uint32_t>(m));
      } else {
        picks.resize(static_cast<std::size_t>(m));
        for (auto& idx : picks) idx = static_cast<std::uint32_t>(rng.below(n));
      }
      for (Index j = 0; j < m; ++j) atoms.col(j) = ds[picks[static_cast<std::size_t>(j)]];
      break;
    }
    case InitMethod::RandomGaussian: {
      for (Index j = 0; j < m; ++j) {
        double norm = 0.0;
        do {
          for (Index r = 0; r < p; ++r) atoms(r, j) = rng.normal();
          norm = atoms.col(j).norm();
        } while (norm == 0.0);
        atoms.col(j) /= norm;
      }
      break;
    }
  }
  return Dictionary::projected(std::move(atoms));
}

// ------------------------------------------------------------- planted

PlantedData generate_planted(Index p, Index m, Index n, Index k_sparsity, double noise_sigma, std::uint64_t seed) {
  if (p < 2) throw Error(ErrorCode::ConfigInvalid, "planted data needs p >= 2 for zero-mean atoms");
  if (m < 1 || n < 1) throw Error(ErrorCode::ConfigInvalid, "planted data needs m, n >= 1");
  if (k_sparsity < 1 || k_sparsity > m) throw Error(ErrorCode::ConfigInvalid, "k_sparsity must lie in [1, m]");
  if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "noise_sigma must be >= 0");

  Rng dict_rng(seed, stream::kPlantedDict);
  Matrix truth(p, m);
  for (Index j = 0; j < m; ++j) {
    double norm = 0.0;
    do {
      for (Index r = 0; r < p; ++r) truth(r, j) = dict_rng.normal();
      truth.col(j).array() -= truth.col(j).mean();
      norm = truth.col(j).norm();
    } while (norm < 1e-8);
    truth.col(j) /= norm;
  }

  PlantedData out{DataSet{}, Dictionary::projected(truth), {}};
  out.data.samples.reserve(static_cast<std::size_t>(n));
  out.codes.reserve(static_cast<std::size_t>(n));
  Rng code_rng(seed, stream::kPlantedCodes);
  for (Index i = 0; i < n; ++i) {
    for (;;) {
      auto support = code_rng.sample_without_replacement(static_cast<std::uint32_t>(m),
                                                         static_cast<std::uint32_t>(k_sparsity));
      std::sort(support.begin(), support.end());
      std::vector<SparseCode::Entry> entries;
      for (auto j : support) {
        double v = 0.0;
        while (v == 0.0) v = code_rng.normal();
        entries.push_back({j, v});
      }
      SparseCode z(m, std::move(entries));
      Vector x = z.apply(truth);
      if (noise_sigma > 0.0)
        for (Index r = 0; r < p; ++r) x[r] += noise_sigma * code_rng.normal();
      const double centred_norm = (x.array() - x.mean()).matrix().norm();
      if (centred_norm < 1e-12) continue;  // redraw a degenerate sample
      out.data.samples.push_back(preprocess(Sample{x, false}));
      out.codes.push_back(std::move(z));
      break;
    }
  }
  return out;
}

// ------------------------------------------------------------- binary

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  out.write(b.data(), 4);
}

void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
  out.write(b.data(), 8);
}

void read_exact(std::istream& in, char* dst, std::size_t count, const char* what) {
  in.read(dst, static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count)
    throw Error(ErrorCode::Truncated, std::string("unexpected end of file while reading ") + what);
}

std::uint32_t get_u32(std::istream& in, const char* what) {
  std::array<unsigned char, 4> b{};
  read_exact(in, reinterpret_cast<char*>(b.data()), 4, what);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
  return v;
}

double get_f64(std::istream& in, const char* what) {
  std::array<unsigned char, 8> b{};
  read_exact(in, reinterpret_cast<char*>(b.data()), 8, what);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
  return std::bit_cast<double>(bits);
}

void expect_magic(std::istream& in, const char (&magic)[8]) {
  char got[8];
  in.read(got, 8);
  if (in.gcount() != 8) throw Error(ErrorCode::Truncated, "file shorter than its magic tag");
  if (std::memcmp(got, magic, 8) != 0) throw Error(ErrorCode::BadMagic, "unrecognised file tag");
}

std::uint32_t checked_u32(Index v, const char* what) {
  if (v < 0 || v > static_cast<Index>(std::numeric_limits<std::uint32_t>::max()))
    throw Error(ErrorCode::ConfigInvalid, std::string(what) + " does not fit in 32 bits");
  return static_cast<std::uint32_t>(v);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

void finish(std::ostream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write to " + path.string() + " failed");
}

}  // namespace

void write_matrix(std::ostream& out, const Matrix& columns) {
  if (!columns.allFinite()) throw Error(ErrorCode::NonFinite, "matrix has a non-finite entry");
  out.write(kMatrixMagic, 8);
  put_u32(out, checked_u32(columns.rows(), "row count"));
  put_u32(out, checked_u32(columns.cols(), "column count"));
  const double* data = columns.data();
  for (Index k = 0; k < columns.size(); ++k) put_f64(out, data[k]);
}

Matrix read_matrix(std::istream& in) {
  expect_magic(in, kMatrixMagic);
  const std::uint32_t p = get_u32(in, "row count");
  const std::uint32_t n = get_u32(in, "column count");
  Matrix out(static_cast<Index>(p), static_cast<Index>(n));
  double* data = out.data();
  for (Index k = 0; k < out.size(); ++k) {
    data[k] = get_f64(in, "matrix payload");
    if (!std::isfinite(data[k])) throw Error(ErrorCode::NonFinite, "matrix payload has a non-finite value");
  }
  return out;
}

void write_matrix_file(const std::filesystem::path& path, const Matrix& columns) {
  auto out = open_out(path);
  write_matrix(out, columns);
  finish(out, path);
}

Matrix read_matrix_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix(in);
}

void write_dataset_file(const std::filesystem::path& path, const DataSet& ds) {
  validate_dataset(ds);
  write_matrix_file(path, ds.to_matrix());
}

DataSet read_dataset_file(const std::filesystem::path& path) { return DataSet::from_matrix(read_matrix_file(path)); }

void write_dictionary_file(const std::filesystem::path& path, const Dictionary& dict) {
  write_matrix_file(path, dict.atoms());
}

Dictionary read_dictionary_file(const std::filesystem::path& path) { return Dictionary(read_matrix_file(path)); }

void write_codes(std::ostream& out, const std::vector<SparseCode>& codes, Index m) {
  out.write(kCodesMagic, 8);
  put_u32(out, checked_u32(m, "code dimension"));
  put_u32(out, checked_u32(static_cast<Index>(codes.size()), "code count"));
  for (const auto& z : codes) {
    if (z.dim() != m) throw Error(ErrorCode::DimensionMismatch, "code dimension differs from file header");
    put_u32(out, static_cast<std::uint32_t>(z.support_size()));
    for (const auto& e : z.entries()) {
      put_u32(out, e.index);
      put_f64(out, e.value);
    }
  }
}

std::vector<SparseCode> read_codes(std::istream& in) {
  expect_magic(in, kCodesMagic);
  const std::uint32_t m = get_u32(in, "code dimension");
  const std::uint32_t n = get_u32(in, "code count");
  std::vector<SparseCode> codes;
  codes.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t count = get_u32(in, "entry count");
    if (count > m) throw Error(ErrorCode::DimensionMismatch, "code has more entries than its dimension");
    std::vector<SparseCode::Entry> entries;
    entries.reserve(count);
    for (std::uint32_t k = 0; k < count; ++k) {
      const std::uint32_t index = get_u32(in, "entry index");
      const double value = get_f64(in, "entry value");
      entries.push_back({index, value});
    }
    codes.emplace_back(static_cast<Index>(m), std::move(entries));
  }
  return codes;
}

void write_codes_file(const std::filesystem::path& path, const std::vector<SparseCode>& codes, Index m) {
  auto out = open_out(path);
  write_codes(out, codes, m);
  finish(out, path);
}

std::vector<SparseCode> read_codes_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_codes(in);
}

// --------------------------------------------------------------- text

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data() + begin, text.data() + end, v);
  if (ec != std::errc() || ptr != text.data() + end)
    throw Error(ErrorCode::ConfigInvalid, "cannot parse number '" + text + "'");
  return v;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

void write_metrics_csv(std::ostream& out, const std::vector<EpochStats>& stats) {
  out << kMetricsHeader << '\n';
  for (const auto& s : stats) {
    out << s.epoch << ',' << format_double(s.objective) << ',' << format_double(s.time_code_update) << ','
        << format_double(s.time_dict_update) << ',' << format_double(s.mean_support) << ',' << s.max_support
        << '\n';
  }
}

void write_metrics_csv_file(const std::filesystem::path& path, const std::vector<EpochStats>& stats) {
  auto out = open_out(path);
  write_metrics_csv(out, stats);
  finish(out, path);
}

std::vector<EpochStats> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Truncated, "metrics file is empty");
  strip_cr(line);
  if (line != kMetricsHeader) throw Error(ErrorCode::BadMagic, "unexpected metrics header");
  std::vector<EpochStats> stats;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) throw Error(ErrorCode::Truncated, "metrics row must have 6 fields");
    EpochStats s;
    s.epoch = static_cast<int>(parse_double(f[0]));
    s.objective = parse_double(f[1]);
    s.time_code_update = parse_double(f[2]);
    s.time_dict_update = parse_double(f[3]);
    s.mean_support = parse_double(f[4]);
    s.max_support = static_cast<std::size_t>(parse_double(f[5]));
    stats.push_back(s);
  }
  return stats;
}

std::vector<EpochStats> read_metrics_csv_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_metrics_csv(in);
}

DataSet read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Empty, "CSV data file is empty");
  DataSet ds;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    Vector v(static_cast<Index>(fields.size()));
    for (std::size_t k = 0; k < fields.size(); ++k) v[static_cast<Index>(k)] = parse_double(fields[k]);
    ds.samples.push_back({std::move(v), false});
  }
  validate_dataset(ds);
  return ds;
}

DataSet read_dataset_csv_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_dataset_csv(in);
}

GrayImage read_pgm(std::istream& in) {
  auto next_token = [&in]() {
    std::string tok;
    for (;;) {
      const int c = in.get();
      if (c == EOF) break;
      if (c == '#') {
        std::string comment;
        std::getline(in, comment);
        if (!tok.empty()) break;
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(static_cast<char>(c));
    }
    return tok;
  };
  if (next_token() != "P5") throw Error(ErrorCode::BadMagic, "not a binary PGM (P5) image");
  GrayImage img;
  try {
    img.width = std::stol(next_token());
    img.height = std::stol(next_token());
    const long maxval = std::stol(next_token());
    if (maxval < 1 || maxval > 255) throw Error(ErrorCode::ConfigInvalid, "only 8-bit PGM images are supported");
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::Truncated, "malformed PGM header");
  }
  if (img.width < 1 || img.height < 1) throw Error(ErrorCode::ConfigInvalid, "PGM image has no pixels");
  const auto count = static_cast<std::size_t>(img.width * img.height);
  std::vector<unsigned char> raw(count);
  read_exact(in, reinterpret_cast<char*>(raw.data()), count, "PGM pixels");
  img.pixels.assign(raw.begin(), raw.end());
  return img;
}

GrayImage read_pgm_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_pgm(in);
}

void write_pgm_file(const std::filesystem::path& path, const GrayImage& image) {
  auto out = open_out(path);
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  for (double v : image.pixels) {
    const double clamped = std::min(255.0, std::max(0.0, std::round(v)));
    out.put(static_cast<char>(static_cast<unsigned char>(clamped)));
  }
  finish(out, path);
}

}  // namespace scc
