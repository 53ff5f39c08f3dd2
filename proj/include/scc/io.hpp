#pragma once

// Data ingestion, synthetic data, dictionary initialization and file formats.
//
// Binary layouts (all integers and floats little-endian):
//   MatrixFile       "SCCMAT01" | u32 p | u32 n | p*n f64, column-major
//   SparseCodesFile  "SCCSPC01" | u32 m | u32 n | n x (u32 count | count x (u32 index, f64 value))
// A dictionary is a MatrixFile with n = m.

#include "scc/core.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>

namespace scc {

struct GrayImage {
  Index width = 0;
  Index height = 0;
  std::vector<double> pixels;  // row-major, height x width

  double at(Index row, Index col) const { return pixels[static_cast<std::size_t>(row * width + col)]; }
};

inline constexpr double kDefaultStdThreshold = 1e-6;

// Slides a window x window box with the given stride; each kept patch is
// flattened row-major. Patches whose population standard deviation is below
// std_threshold are dropped. Patches are returned unpreprocessed.
DataSet extract_patches(const GrayImage& image, Index window = 16, Index stride = 16,
                        double std_threshold = kDefaultStdThreshold);

// Mean-centres then scales to unit Euclidean norm. Throws DegenerateSample.
Sample preprocess(const Sample& s);
DataSet preprocess(const DataSet& ds);

// Initial dictionary. random_patches copies m samples (drawn without
// replacement when m <= n); random_gaussian draws N(0, 1) columns scaled to
// unit norm. Every column ends up in the unit ball.
Dictionary init_dictionary(const DataSet& ds, Index m, InitMethod method, std::uint64_t seed);

struct PlantedData {
  DataSet data;
  Dictionary truth;
  std::vector<SparseCode> codes;  // planted codes before preprocessing scale
};

// Zero-mean unit-norm ground-truth atoms; each sample is D* z + noise with
// k_sparsity uniformly drawn support and N(0, 1) values, then preprocessed.
PlantedData generate_planted(Index p, Index m, Index n, Index k_sparsity, double noise_sigma, std::uint64_t seed);

// --- binary formats

inline constexpr char kMatrixMagic[8] = {'S', 'C', 'C', 'M', 'A', 'T', '0', '1'};
inline constexpr char kCodesMagic[8] = {'S', 'C', 'C', 'S', 'P', 'C', '0', '1'};

void write_matrix(std::ostream& out, const Matrix& columns);
Matrix read_matrix(std::istream& in);
void write_matrix_file(const std::filesystem::path& path, const Matrix& columns);
Matrix read_matrix_file(const std::filesystem::path& path);

void write_dataset_file(const std::filesystem::path& path, const DataSet& ds);
DataSet read_dataset_file(const std::filesystem::path& path);

void write_dictionary_file(const std::filesystem::path& path, const Dictionary& dict);
Dictionary read_dictionary_file(const std::filesystem::path& path);

void write_codes(std::ostream& out, const std::vector<SparseCode>& codes, Index m);
std::vector<SparseCode> read_codes(std::istream& in);
void write_codes_file(const std::filesystem::path& path, const std::vector<SparseCode>& codes, Index m);
std::vector<SparseCode> read_codes_file(const std::filesystem::path& path);

// --- text formats

inline constexpr const char* kMetricsHeader = "epoch,objective,time_code_s,time_dict_s,mean_support,max_support";

void write_metrics_csv(std::ostream& out, const std::vector<EpochStats>& stats);
void write_metrics_csv_file(const std::filesystem::path& path, const std::vector<EpochStats>& stats);
std::vector<EpochStats> read_metrics_csv(std::istream& in);
std::vector<EpochStats> read_metrics_csv_file(const std::filesystem::path& path);

// Header row, then one sample per line, comma-separated.
DataSet read_dataset_csv(std::istream& in);
DataSet read_dataset_csv_file(const std::filesystem::path& path);

// 8-bit binary PGM (P5).
GrayImage read_pgm(std::istream& in);
GrayImage read_pgm_file(const std::filesystem::path& path);
void write_pgm_file(const std::filesystem::path& path, const GrayImage& image);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace scc
