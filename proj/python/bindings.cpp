#include "scc/eval.hpp"
#include "scc/io.hpp"
#include "scc/lasso.hpp"
#include "scc/trainer.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>

namespace py = pybind11;
using namespace scc;

namespace {

// Columns of X are samples; codes travel as dense m x n matrices.
std::vector<SparseCode> codes_from_dense(const Matrix& Z) {
  std::vector<SparseCode> out;
  out.reserve(static_cast<std::size_t>(Z.cols()));
  for (Index i = 0; i < Z.cols(); ++i) out.push_back(SparseCode::from_dense(Z.col(i)));
  return out;
}

Matrix codes_to_dense(const std::vector<SparseCode>& codes, Index m) {
  Matrix Z = Matrix::Zero(m, static_cast<Index>(codes.size()));
  for (std::size_t i = 0; i < codes.size(); ++i) Z.col(static_cast<Index>(i)) = codes[i].to_dense();
  return Z;
}

py::dict stats_to_dict(const EpochStats& s) {
  py::dict d;
  d["epoch"] = s.epoch;
  d["objective"] = s.objective;
  d["time_code_s"] = s.time_code_update;
  d["time_dict_s"] = s.time_dict_update;
  d["mean_support"] = s.mean_support;
  d["max_support"] = s.max_support;
  return d;
}

py::tuple train(const Matrix& X, Index dict_size, std::optional<double> lambda, int epochs, int cd_steps,
                const std::string& algo, double rate_a, double rate_b, const std::string& init,
                const std::string& order, std::uint64_t seed, bool preprocess_input,
                std::optional<std::function<void(py::dict)>> on_epoch) {
  DataSet ds = DataSet::from_matrix(X);
  if (preprocess_input) ds = preprocess(ds);
  TrainConfig cfg;
  cfg.lambda = lambda;
  cfg.epochs = epochs;
  cfg.cd_steps = cd_steps;
  cfg.dict_size = dict_size > 0 ? dict_size : 2 * ds.dim();
  cfg.seed = seed;
  if (init == "patches")
    cfg.init = InitMethod::RandomPatches;
  else if (init == "gaussian")
    cfg.init = InitMethod::RandomGaussian;
  else
    throw Error(ErrorCode::ConfigInvalid, "init must be 'patches' or 'gaussian'");
  if (order == "seq")
    cfg.ordering = Ordering::Sequential;
  else if (order == "shuffle")
    cfg.ordering = Ordering::Shuffled;
  else
    throw Error(ErrorCode::ConfigInvalid, "order must be 'seq' or 'shuffle'");

  TrainHooks hooks;
  if (on_epoch) hooks.on_epoch = [cb = *on_epoch](const EpochStats& s) { cb(stats_to_dict(s)); };

  TrainResult r;
  if (algo == "scc") {
    r = scc_train(ds, cfg, hooks);
  } else if (algo == "natural") {
    cfg.rate_schedule = NaturalRate{rate_a, rate_b};
    r = natural_rate_train(ds, cfg, hooks);
  } else if (algo == "batch") {
    r = batch_train(ds, cfg, hooks);
  } else {
    throw Error(ErrorCode::ConfigInvalid, "algo must be 'scc', 'batch' or 'natural'");
  }
  py::list stats;
  for (const auto& s : r.stats) stats.append(stats_to_dict(s));
  return py::make_tuple(r.dictionary.atoms(), codes_to_dense(r.codes, cfg.dict_size), stats);
}

Matrix encode(const Matrix& D, const Matrix& X, std::optional<double> lambda, const std::string& mode) {
  const Dictionary dict(D);
  const DataSet ds = DataSet::from_matrix(X);
  if (ds.dim() != dict.dim()) throw Error(ErrorCode::DimensionMismatch, "data and dictionary dimensions differ");
  const double lam = lambda.value_or(default_lambda(dict.dim()));
  int steps = 0;
  if (mode.rfind("scc:", 0) == 0) {
    steps = std::stoi(mode.substr(4));
    if (steps < 1) throw Error(ErrorCode::ConfigInvalid, "mode scc:S needs S >= 1");
  } else if (mode != "oracle") {
    throw Error(ErrorCode::ConfigInvalid, "mode must be 'scc:S' or 'oracle'");
  }
  std::vector<SparseCode> codes(ds.size());
  {
    py::gil_scoped_release release;
    parallel_for(ds.size(), [&](std::size_t i) {
      codes[i] = steps == 0 ? lasso_oracle_cd(dict, ds[i], lam, kBatchLassoTol)
                            : encode_scc(dict, SparseCode(dict.size()), ds[i], lam, steps).code;
    });
  }
  return codes_to_dense(codes, dict.size());
}

}  // namespace

PYBIND11_MODULE(_scc, m) {
  m.doc() = "Sparse dictionary learning by stochastic coordinate coding";

  py::register_exception<Error>(m, "SccError", PyExc_ValueError);

  m.def("default_lambda", &default_lambda, py::arg("p"));
  m.def("soft_threshold", &soft_threshold, py::arg("b"), py::arg("lam"));

  m.def("train", &train, py::arg("X"), py::arg("dict_size") = 0, py::arg("lam") = py::none(),
        py::arg("epochs") = 10, py::arg("cd_steps") = 3, py::arg("algo") = "scc", py::arg("rate_a") = 1.0,
        py::arg("rate_b") = 0.0, py::arg("init") = "patches", py::arg("order") = "seq", py::arg("seed") = 0,
        py::arg("preprocess") = false, py::arg("on_epoch") = py::none(),
        "Train on the columns of X. Returns (D, Z, stats) with Z dense m x n.");

  m.def("encode", &encode, py::arg("D"), py::arg("X"), py::arg("lam") = py::none(), py::arg("mode") = "scc:3",
        "Encode the columns of X against D; mode is 'scc:S' or 'oracle'.");

  m.def(
      "lasso_cd",
      [](const Matrix& D, const Vector& x, double lam, double tol) {
        return lasso_oracle_cd(Dictionary(D), x, lam, tol).to_dense();
      },
      py::arg("D"), py::arg("x"), py::arg("lam"), py::arg("tol") = 1e-10);
  m.def(
      "lasso_prox",
      [](const Matrix& D, const Vector& x, double lam, double tol) {
        return lasso_oracle_prox(Dictionary(D), x, lam, tol).to_dense();
      },
      py::arg("D"), py::arg("x"), py::arg("lam"), py::arg("tol") = 1e-10);

  m.def(
      "objective",
      [](const Matrix& D, const Matrix& Z, const Matrix& X, double lam) {
        return objective(Dictionary(D), codes_from_dense(Z), DataSet::from_matrix(X), lam);
      },
      py::arg("D"), py::arg("Z"), py::arg("X"), py::arg("lam"));

  m.def(
      "preprocess", [](const Matrix& X) { return preprocess(DataSet::from_matrix(X)).to_matrix(); },
      py::arg("X"), "Zero-mean, unit-norm columns.");

  m.def(
      "extract_patches",
      [](const Matrix& image, Index window, Index stride, double std_threshold) {
        GrayImage img;
        img.height = image.rows();
        img.width = image.cols();
        img.pixels.resize(static_cast<std::size_t>(image.size()));
        for (Index r = 0; r < image.rows(); ++r)
          for (Index c = 0; c < image.cols(); ++c) img.pixels[static_cast<std::size_t>(r * img.width + c)] = image(r, c);
        return extract_patches(img, window, stride, std_threshold).to_matrix();
      },
      py::arg("image"), py::arg("window") = 16, py::arg("stride") = 16,
      py::arg("std_threshold") = kDefaultStdThreshold, "Row-major patches of a 2-D image as columns.");

  m.def(
      "generate_planted",
      [](Index p, Index m_atoms, Index n, Index k, double sigma, std::uint64_t seed) {
        const PlantedData pd = generate_planted(p, m_atoms, n, k, sigma, seed);
        return py::make_tuple(pd.data.to_matrix(), pd.truth.atoms(), codes_to_dense(pd.codes, m_atoms));
      },
      py::arg("p"), py::arg("m"), py::arg("n"), py::arg("k"), py::arg("sigma"), py::arg("seed") = 0,
      "Returns (X, D_true, Z_true).");

  m.def(
      "read_matrix", [](const std::filesystem::path& path) { return read_matrix_file(path); }, py::arg("path"));
  m.def(
      "write_matrix", [](const std::filesystem::path& path, const Matrix& M) { write_matrix_file(path, M); },
      py::arg("path"), py::arg("M"));
  m.def(
      "read_codes",
      [](const std::filesystem::path& path) {
        const auto codes = read_codes_file(path);
        const Index m_atoms = codes.empty() ? 0 : codes.front().dim();
        return codes_to_dense(codes, m_atoms);
      },
      py::arg("path"), "Dense m x n codes from an SCCSPC01 file.");
  m.def(
      "write_codes",
      [](const std::filesystem::path& path, const Matrix& Z) {
        write_codes_file(path, codes_from_dense(Z), Z.rows());
      },
      py::arg("path"), py::arg("Z"));
}
