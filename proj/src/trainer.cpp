#include "scc/trainer.hpp"

#include "scc/dict.hpp"
#include "scc/eval.hpp"
#include "scc/io.hpp"
#include "scc/lasso.hpp"

#include <chrono>
#include <numeric>

namespace scc {

NaturalRateSchedule::NaturalRateSchedule(double a, double b) : a_(a), b_(b) {
  if (!(a > 0.0) || !(b >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "natural rate requires a > 0 and b >= 0");
}

double NaturalRateSchedule::next() {
  const double eta = peek();
  ++t_;
  return eta;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::duration d) { return std::chrono::duration<double>(d).count(); }

EpochStats finish_epoch(int epoch, const Dictionary& dict, const std::vector<SparseCode>& codes, const DataSet& ds,
                        double lambda, double t_code, double t_dict) {
  EpochStats s;
  s.epoch = epoch;
  s.objective = objective(dict, codes, ds, lambda);
  s.time_code_update = t_code;
  s.time_dict_update = t_dict;
  const SparsityStats sp = sparsity_stats(codes);
  s.mean_support = sp.mean_support;
  s.max_support = sp.max_support;
  return s;
}

void check_inputs(const DataSet& ds, const TrainConfig& cfg) {
  validate_dataset(ds);
  cfg.validate();
  if (cfg.dict_size > static_cast<Index>(std::numeric_limits<std::uint32_t>::max()))
    throw Error(ErrorCode::ConfigInvalid, "dict_size does not fit the code index type");
}

TrainResult stochastic_train(const DataSet& ds, const TrainConfig& cfg, const TrainHooks& hooks) {
  check_inputs(ds, cfg);
  const Index p = ds.dim();
  const Index m = cfg.dict_size;
  const double lambda = cfg.resolved_lambda(p);
  const std::size_t n = ds.size();

  TrainResult out;
  out.dictionary = init_dictionary(ds, m, cfg.init, cfg.seed);
  out.codes.assign(n, SparseCode(m));
  out.stats.reserve(static_cast<std::size_t>(cfg.epochs));

  const auto* natural = std::get_if<NaturalRate>(&cfg.rate_schedule);
  HessianDiag hessian(m);
  std::optional<NaturalRateSchedule> schedule;
  if (natural) schedule.emplace(natural->a, natural->b);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng order_rng(cfg.seed, stream::kOrdering);

  CDWorkspace ws(p, m);
  Vector residual_neg(p);
  Dictionary& dict = out.dictionary;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.ordering == Ordering::Shuffled) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      order_rng.shuffle(order);
    }
    Clock::duration t_code{};
    Clock::duration t_dict{};
    for (const std::size_t i : order) {
      const auto t0 = Clock::now();
      CDResult enc = encode_scc(dict, out.codes[i], ds[i], lambda, cfg.cd_steps, cfg.cd_full_cycles, ws);
      const auto t1 = Clock::now();

      residual_neg = -ws.residual;
      double scalar_rate = 0.0;
      if (schedule) {
        scalar_rate = schedule->next();
        sgd_update_support_inplace(dict, enc.code, residual_neg, scalar_rate);
      } else {
        hessian.accumulate(enc.code);
        sgd_update_support_inplace(dict, enc.code, residual_neg, hessian);
      }
      const auto t2 = Clock::now();
      t_code += t1 - t0;
      t_dict += t2 - t1;

      if (hooks.on_step) {
        hooks.on_step(StepView{epoch, i, out.codes[i], enc.code, dict, schedule ? nullptr : &hessian, scalar_rate});
      }
      out.codes[i] = std::move(enc.code);
    }
    out.stats.push_back(finish_epoch(epoch, dict, out.codes, ds, lambda, seconds(t_code), seconds(t_dict)));
    if (hooks.on_epoch) hooks.on_epoch(out.stats.back());
  }
  return out;
}

}  // namespace

TrainResult scc_train(const DataSet& ds, const TrainConfig& cfg, const TrainHooks& hooks) {
  return stochastic_train(ds, cfg, hooks);
}

TrainResult natural_rate_train(const DataSet& ds, const TrainConfig& cfg, const TrainHooks& hooks) {
  if (!std::holds_alternative<NaturalRate>(cfg.rate_schedule))
    throw Error(ErrorCode::ConfigInvalid, "natural_rate_train requires a natural rate schedule");
  return stochastic_train(ds, cfg, hooks);
}

TrainResult batch_train(const DataSet& ds, const TrainConfig& cfg, const TrainHooks& hooks) {
  check_inputs(ds, cfg);
  const Index p = ds.dim();
  const Index m = cfg.dict_size;
  const double lambda = cfg.resolved_lambda(p);
  const std::size_t n = ds.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  TrainResult out;
  out.dictionary = init_dictionary(ds, m, cfg.init, cfg.seed);
  out.codes.assign(n, SparseCode(m));
  const Matrix X = ds.to_matrix();
  Matrix Z(m, static_cast<Index>(n));

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < n; ++i) out.codes[i] = lasso_oracle_cd(out.dictionary, ds[i], lambda, kBatchLassoTol);
    const auto t1 = Clock::now();

    Z.setZero();
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& e : out.codes[i].entries()) Z(e.index, static_cast<Index>(i)) = e.value;

    Matrix residual = out.dictionary.atoms() * Z - X;
    double quad = 0.5 * inv_n * residual.squaredNorm();
    Matrix grad = inv_n * residual * Z.transpose();
    const double curvature = (Z.array().square().rowwise().sum() * inv_n).maxCoeff();
    if (curvature > 0.0) {
      double eta = 2.0 / curvature;
      for (int trial = 0; trial < kBatchGradientTrials; ++trial) {
        Dictionary candidate = Dictionary::projected(out.dictionary.atoms() - eta * grad);
        Matrix cand_residual = candidate.atoms() * Z - X;
        const double cand_quad = 0.5 * inv_n * cand_residual.squaredNorm();
        if (cand_quad <= quad) {
          out.dictionary = std::move(candidate);
          residual = std::move(cand_residual);
          quad = cand_quad;
          grad = inv_n * residual * Z.transpose();
        } else {
          eta *= 0.5;
        }
      }
    }
    const auto t2 = Clock::now();

    out.stats.push_back(
        finish_epoch(epoch, out.dictionary, out.codes, ds, lambda, seconds(t1 - t0), seconds(t2 - t1)));
    if (hooks.on_epoch) hooks.on_epoch(out.stats.back());
  }
  return out;
}

}  // namespace scc
