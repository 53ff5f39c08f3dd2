#include "cli.hpp"

#include "scc/eval.hpp"
#include "scc/io.hpp"
#include "scc/lasso.hpp"
#include "scc/trainer.hpp"

#include <CLI11.hpp>

#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace scc::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataOptions {
  std::string data_path;
  std::string synthetic;
  std::uint64_t data_seed = 0;
  bool data_seed_set = false;
  bool preprocess_input = false;
  long window = 16;
  long stride = 16;
  double std_threshold = kDefaultStdThreshold;
};

void add_data_options(CLI::App& cmd, DataOptions& d) {
  cmd.add_option("--data", d.data_path, "SCCMAT01 matrix, P5 PGM image, or CSV (header + one sample per line)");
  cmd.add_option("--synthetic", d.synthetic, "Planted data p,m,n,k,sigma");
  cmd.add_option_function<std::uint64_t>(
      "--data-seed", [&d](std::uint64_t v) { d.data_seed = v, d.data_seed_set = true; },
      "Seed for --synthetic (defaults to --seed)");
  cmd.add_flag("--preprocess", d.preprocess_input, "Zero-mean unit-norm matrix/CSV input");
  cmd.add_option("--window", d.window, "Patch window for PGM input")->check(CLI::PositiveNumber);
  cmd.add_option("--stride", d.stride, "Patch stride for PGM input")->check(CLI::PositiveNumber);
  cmd.add_option("--std-threshold", d.std_threshold, "Discard PGM patches with lower pixel std");
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw UsageError(std::string("empty item in ") + flag);
    std::istringstream is(item);
    T v{};
    is >> v;
    if (!is || !is.eof()) throw UsageError(std::string("cannot parse '") + item + "' in " + flag);
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string(flag) + " must not be empty");
  return out;
}

DataSet load_data(const DataOptions& d, std::uint64_t seed) {
  const bool has_path = !d.data_path.empty();
  const bool has_synth = !d.synthetic.empty();
  if (has_path == has_synth) throw UsageError("exactly one of --data or --synthetic is required");

  if (has_synth) {
    std::vector<std::string> parts;
    std::stringstream ss(d.synthetic);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    if (parts.size() != 5) throw UsageError("--synthetic expects p,m,n,k,sigma");
    try {
      const long p = std::stol(parts[0]);
      const long m = std::stol(parts[1]);
      const long n = std::stol(parts[2]);
      const long k = std::stol(parts[3]);
      const double sigma = std::stod(parts[4]);
      return generate_planted(p, m, n, k, sigma, d.data_seed_set ? d.data_seed : seed).data;
    } catch (const std::logic_error&) {
      throw UsageError("--synthetic expects p,m,n,k,sigma");
    }
  }

  std::ifstream probe(d.data_path, std::ios::binary);
  if (!probe) throw Error(ErrorCode::Io, "cannot open " + d.data_path);
  char head[8] = {};
  probe.read(head, 8);
  const auto got = probe.gcount();
  probe.close();

  if (got == 8 && std::memcmp(head, kMatrixMagic, 8) == 0) {
    DataSet ds = read_dataset_file(d.data_path);
    return d.preprocess_input ? preprocess(ds) : ds;
  }
  if (got >= 2 && head[0] == 'P' && head[1] == '5') {
    const GrayImage img = read_pgm_file(d.data_path);
    DataSet raw = extract_patches(img, d.window, d.stride, d.std_threshold);
    if (raw.size() == 0) throw Error(ErrorCode::Empty, "no patches survived the std threshold");
    return preprocess(raw);
  }
  DataSet ds = read_dataset_csv_file(d.data_path);
  return d.preprocess_input ? preprocess(ds) : ds;
}

void log_epoch(std::ostream& err, const char* algo, const EpochStats& s) {
  err << algo << " epoch " << s.epoch << " objective " << format_double(s.objective) << " code_s "
      << format_double(s.time_code_update) << " dict_s " << format_double(s.time_dict_update) << " mean_support "
      << format_double(s.mean_support) << '\n';
}

// ------------------------------------------------------------------ train

struct TrainOptions {
  DataOptions data;
  long dict_size = 0;
  double lambda = 0.0;
  int epochs = 10;
  int cd_steps = 3;
  std::string algo = "scc";
  double rate_a = 1.0;
  double rate_b = 0.0;
  std::string init = "patches";
  std::string order = "seq";
  std::uint64_t seed = 0;
  std::string out_dict;
  std::string out_codes;
  std::string out_metrics;
};

int run_train(const TrainOptions& o, CLI::App& cmd, std::ostream& err) {
  const DataSet ds = load_data(o.data, o.seed);
  TrainConfig cfg;
  if (cmd.count("--lambda")) cfg.lambda = o.lambda;
  cfg.epochs = o.epochs;
  cfg.cd_steps = o.cd_steps;
  cfg.dict_size = o.dict_size > 0 ? o.dict_size : 2 * ds.dim();
  cfg.init = o.init == "gaussian" ? InitMethod::RandomGaussian : InitMethod::RandomPatches;
  cfg.ordering = o.order == "shuffle" ? Ordering::Shuffled : Ordering::Sequential;
  cfg.seed = o.seed;

  TrainHooks hooks;
  const char* algo = o.algo.c_str();
  hooks.on_epoch = [&err, algo](const EpochStats& s) { log_epoch(err, algo, s); };

  TrainResult result;
  if (o.algo == "scc") {
    result = scc_train(ds, cfg, hooks);
  } else if (o.algo == "natural") {
    cfg.rate_schedule = NaturalRate{o.rate_a, o.rate_b};
    result = natural_rate_train(ds, cfg, hooks);
  } else {
    result = batch_train(ds, cfg, hooks);
  }

  if (!o.out_dict.empty()) write_dictionary_file(o.out_dict, result.dictionary);
  if (!o.out_codes.empty()) write_codes_file(o.out_codes, result.codes, cfg.dict_size);
  if (!o.out_metrics.empty()) write_metrics_csv_file(o.out_metrics, result.stats);
  return kExitOk;
}

// ----------------------------------------------------------------- encode

struct EncodeOptions {
  std::string dict_path;
  DataOptions data;
  double lambda = 0.0;
  std::string mode = "scc:3";
  std::string out;
  std::string pool_boundaries;
  std::string out_pooled;
};

int run_encode(const EncodeOptions& o, CLI::App& cmd, std::ostream& err) {
  int steps = 0;
  if (o.mode == "oracle") {
    steps = 0;
  } else if (o.mode.rfind("scc:", 0) == 0) {
    try {
      std::size_t used = 0;
      steps = std::stoi(o.mode.substr(4), &used);
      if (used != o.mode.size() - 4 || steps < 1) throw std::invalid_argument("steps");
    } catch (const std::logic_error&) {
      throw UsageError("--mode expects scc:S with S >= 1, or oracle");
    }
  } else {
    throw UsageError("--mode expects scc:S or oracle");
  }

  std::vector<std::size_t> boundaries;
  if (o.pool_boundaries.empty() != o.out_pooled.empty())
    throw UsageError("--pool-boundaries and --out-pooled go together");
  if (!o.pool_boundaries.empty()) boundaries = parse_list<std::size_t>(o.pool_boundaries, "--pool-boundaries");

  const Dictionary dict = read_dictionary_file(o.dict_path);
  const DataSet ds = load_data(o.data, 0);
  if (ds.dim() != dict.dim()) throw Error(ErrorCode::DimensionMismatch, "data and dictionary dimensions differ");
  const double lambda = cmd.count("--lambda") ? o.lambda : default_lambda(ds.dim());
  if (!(lambda > 0.0)) throw UsageError("--lambda must be positive");

  std::vector<SparseCode> codes(ds.size());
  parallel_for(ds.size(), [&](std::size_t i) {
    codes[i] = steps == 0 ? lasso_oracle_cd(dict, ds[i], lambda, kBatchLassoTol)
                          : encode_scc(dict, SparseCode(dict.size()), ds[i], lambda, steps).code;
  });
  write_codes_file(o.out, codes, dict.size());
  if (!boundaries.empty()) {
    const auto pooled = max_pool_groups(codes, boundaries);
    Matrix features(dict.size(), static_cast<Index>(pooled.size()));
    for (std::size_t g = 0; g < pooled.size(); ++g) features.col(static_cast<Index>(g)) = pooled[g];
    write_matrix_file(o.out_pooled, features);
  }
  err << "encoded " << ds.size() << " samples, objective " << format_double(objective(dict, codes, ds, lambda))
      << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------ bench

struct BenchOptions {
  DataOptions data;
  std::string dict_sizes;
  std::string cd_steps = "3";
  std::string algos = "scc,batch";
  int epochs = 10;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

inline constexpr const char* kBenchHeader = "algo,m,S,epoch,objective,time_code_s,time_dict_s";

int run_bench(const BenchOptions& o, CLI::App& cmd, std::ostream& err) {
  const auto sizes = parse_list<long>(o.dict_sizes, "--dict-sizes");
  const auto steps = parse_list<int>(o.cd_steps, "--cd-steps");
  const auto algos = parse_list<std::string>(o.algos, "--algos");
  for (long m : sizes)
    if (m < 1) throw UsageError("--dict-sizes entries must be >= 1");
  for (int s : steps)
    if (s < 1) throw UsageError("--cd-steps entries must be >= 1");
  for (const auto& a : algos)
    if (a != "scc" && a != "batch") throw UsageError("--algos entries must be scc or batch");
  const bool want_scc = std::find(algos.begin(), algos.end(), "scc") != algos.end();
  const bool want_batch = std::find(algos.begin(), algos.end(), "batch") != algos.end();

  const DataSet ds = load_data(o.data, o.seed);
  std::ofstream out(o.out, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + o.out + " for writing");
  out << kBenchHeader << '\n';

  auto emit = [&](const char* algo, long m, int s, const TrainResult& r) {
    for (const auto& st : r.stats) {
      out << algo << ',' << m << ',' << s << ',' << st.epoch << ',' << format_double(st.objective) << ','
          << format_double(st.time_code_update) << ',' << format_double(st.time_dict_update) << '\n';
    }
  };

  for (long m : sizes) {
    TrainConfig cfg;
    if (cmd.count("--lambda")) cfg.lambda = o.lambda;
    cfg.epochs = o.epochs;
    cfg.dict_size = m;
    cfg.seed = o.seed;
    if (want_scc) {
      for (int s : steps) {
        cfg.cd_steps = s;
        TrainResult r = scc_train(ds, cfg);
        err << "scc m=" << m << " S=" << s << " final objective " << format_double(r.stats.back().objective) << '\n';
        emit("scc", m, s, r);
      }
    }
    if (want_batch) {
      cfg.cd_steps = 1;
      TrainResult r = batch_train(ds, cfg);
      err << "batch m=" << m << " final objective " << format_double(r.stats.back().objective) << '\n';
      emit("batch", m, 0, r);
    }
  }
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write to " + o.out + " failed");
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse dictionary learning by stochastic coordinate coding", "scc"};
  app.require_subcommand(1);

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Learn a dictionary and sparse codes");
  add_data_options(*train_cmd, train.data);
  train_cmd->add_option("--dict-size", train.dict_size, "Number of atoms m (default 2p)")->check(CLI::PositiveNumber);
  train_cmd->add_option("--lambda", train.lambda, "Regularization weight (default 1.2/sqrt(p))")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--epochs", train.epochs, "Epochs")->check(CLI::PositiveNumber);
  train_cmd->add_option("--cd-steps", train.cd_steps, "Coordinate-descent cycles per sample")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--algo", train.algo, "Trainer")->check(CLI::IsMember({"scc", "batch", "natural"}));
  train_cmd->add_option("--rate-a", train.rate_a, "Natural rate numerator a")->check(CLI::PositiveNumber);
  train_cmd->add_option("--rate-b", train.rate_b, "Natural rate offset b")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--init", train.init, "Dictionary initialization")
      ->check(CLI::IsMember({"patches", "gaussian"}));
  train_cmd->add_option("--order", train.order, "Sample ordering")->check(CLI::IsMember({"seq", "shuffle"}));
  train_cmd->add_option("--seed", train.seed, "Random seed");
  train_cmd->add_option("--out-dict", train.out_dict, "Dictionary output (SCCMAT01)");
  train_cmd->add_option("--out-codes", train.out_codes, "Codes output (SCCSPC01)");
  train_cmd->add_option("--out-metrics", train.out_metrics, "Per-epoch metrics CSV");

  EncodeOptions encode;
  auto* encode_cmd = app.add_subcommand("encode", "Sparse-code data against a fixed dictionary");
  encode_cmd->add_option("--dict", encode.dict_path, "Dictionary (SCCMAT01)")->required();
  add_data_options(*encode_cmd, encode.data);
  encode_cmd->add_option("--lambda", encode.lambda, "Regularization weight (default 1.2/sqrt(p))")
      ->check(CLI::PositiveNumber);
  encode_cmd->add_option("--mode", encode.mode, "scc:S or oracle");
  encode_cmd->add_option("--out", encode.out, "Codes output (SCCSPC01)")->required();
  encode_cmd->add_option("--pool-boundaries", encode.pool_boundaries,
                         "Comma-separated first sample index of each pooling group (starts at 0)");
  encode_cmd->add_option("--out-pooled", encode.out_pooled, "Max-pooled |code| per group (SCCMAT01, m x groups)");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time SCC and batch training across a grid");
  add_data_options(*bench_cmd, bench.data);
  bench_cmd->add_option("--dict-sizes", bench.dict_sizes, "Comma-separated atom counts")->required();
  bench_cmd->add_option("--cd-steps", bench.cd_steps, "Comma-separated SCC step counts");
  bench_cmd->add_option("--algos", bench.algos, "Comma-separated subset of scc,batch");
  bench_cmd->add_option("--epochs", bench.epochs, "Epochs")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--lambda", bench.lambda, "Regularization weight")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "Random seed");
  bench_cmd->add_option("--out", bench.out, "CSV output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    return kExitUsage;
  }

  try {
    if (*train_cmd) return run_train(train, *train_cmd, err);
    if (*encode_cmd) return run_encode(encode, *encode_cmd, err);
    return run_bench(bench, *bench_cmd, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace scc::cli
