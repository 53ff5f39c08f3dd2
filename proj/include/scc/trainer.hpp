#pragma once

// Training loops: stochastic coordinate coding with Hessian-diagonal rates,
// the same loop with a natural a/(t+b) rate, and batch alternating
// minimization as a quality reference.

#include "scc/core.hpp"

#include <functional>

namespace scc {

struct TrainResult {
  Dictionary dictionary;
  std::vector<SparseCode> codes;
  std::vector<EpochStats> stats;
};

// eta_t = a / (t + b), t = 1, 2, ...
class NaturalRateSchedule {
 public:
  NaturalRateSchedule(double a, double b);
  double next();
  double peek() const { return a_ / (static_cast<double>(t_) + b_); }
  std::uint64_t step() const { return t_; }

 private:
  double a_;
  double b_;
  std::uint64_t t_ = 1;
};

// State visible after each sample of a stochastic epoch.
struct StepView {
  int epoch;
  std::size_t sample;
  const SparseCode& code_in;   // warm start handed to the encoder
  const SparseCode& code_out;
  const Dictionary& dictionary;  // after the update
  const HessianDiag* hessian;    // null under the natural schedule
  double scalar_rate;            // natural schedule only, else 0
};

struct TrainHooks {
  std::function<void(const EpochStats&)> on_epoch;
  std::function<void(const StepView&)> on_step;
};

// Per epoch and sample: warm-started encode, Hessian accumulation, then the
// support-restricted dictionary step using the encoder's residual. Uses the
// rate schedule in cfg (adaptive unless set otherwise).
TrainResult scc_train(const DataSet& ds, const TrainConfig& cfg, const TrainHooks& hooks = {});

// scc_train with the scalar natural rate; cfg.rate_schedule must be
// NaturalRate.
TrainResult natural_rate_train(const DataSet& ds, const TrainConfig& cfg, const TrainHooks& hooks = {});

inline constexpr double kBatchLassoTol = 1e-10;
inline constexpr int kBatchGradientTrials = 20;

// Per epoch: every code solved by lasso_oracle_cd, then up to
// kBatchGradientTrials full-gradient trials with step halving whenever the
// reconstruction term would increase.
TrainResult batch_train(const DataSet& ds, const TrainConfig& cfg, const TrainHooks& hooks = {});

}  // namespace scc
