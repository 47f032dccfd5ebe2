// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "fpinn/network.hpp"

namespace fpinn {

/// Optimizer, schedule and loss-weight settings for one training phase.
struct TrainConfig {
  double eta0 = 5e-3;
  double eta_min = 1e-5;
  int t_max = 30000;
  double weight_decay = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double lambda_er = 0.01;
  double tau = 0.002;
  std::uint64_t seed = 0;
  bool deterministic = true;

  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// η_min + ½(η₀ − η_min)(1 + cos(π·T_cur/T_max)), for 0 <= T_cur <= T_max.
double cosine_lr(int t_cur, const TrainConfig& config);

/// AdamW with decoupled weight decay and bias-corrected moments.
class AdamW {
 public:
  explicit AdamW(const ParamStore& like);

  /// θ ← θ(1 − lr·λ), then θ ← θ − lr·m̂/(√v̂ + ε).
  void step(ParamStore& params, const ParamStore& grads, double lr, const TrainConfig& config);
  long steps() const { return step_; }

 private:
  ParamStore m_;
  ParamStore v_;
  long step_ = 0;
};

}  // namespace fpinn
