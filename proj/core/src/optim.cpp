// SPDX-License-Identifier: Apache-2.0
#include "fpinn/optim.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fpinn/error.hpp"

namespace fpinn {

void TrainConfig::validate() const {
  const auto fail = [](const std::string& m) { throw ValidationError("TrainConfig: " + m); };
  if (!(eta_min > 0.0 && eta_min <= eta0)) fail("need 0 < eta_min <= eta0");
  if (t_max < 0) fail("T_max must be >= 0");
  if (!(lambda_er >= 0.0)) fail("lambda_er must be >= 0");
  if (!(tau > 0.0)) fail("tau must be > 0");
  if (!(weight_decay >= 0.0)) fail("weight_decay must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) fail("betas must be in [0, 1)");
  if (!(adam_eps > 0.0)) fail("adam eps must be > 0");
}

double cosine_lr(int t_cur, const TrainConfig& config) {
  if (t_cur < 0 || t_cur > config.t_max || config.t_max < 1) {
    std::ostringstream msg;
    msg << "cosine_lr: T_cur = " << t_cur << " outside [0, " << config.t_max << "]";
    throw ValidationError(msg.str());
  }
  const double phase = std::numbers::pi * static_cast<double>(t_cur) / config.t_max;
  return config.eta_min + 0.5 * (config.eta0 - config.eta_min) * (1.0 + std::cos(phase));
}

AdamW::AdamW(const ParamStore& like) : m_(like.zeros_like()), v_(like.zeros_like()) {}

void AdamW::step(ParamStore& params, const ParamStore& grads, double lr, const TrainConfig& config) {
  if (params.group_count() != grads.group_count() || params.size() != grads.size() ||
      params.size() != m_.size()) {
    throw ValidationError("AdamW::step: parameter and gradient layouts differ");
  }
  ++step_;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(step_));
  const double decay = 1.0 - lr * config.weight_decay;
  for (int g = 0; g < params.group_count(); ++g) {
    auto& theta = params.group(g).values;
    const auto& grad = grads.group(g).values;
    auto& m = m_.group(g).values;
    auto& v = v_.group(g).values;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      theta[i] *= decay;
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * grad[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      theta[i] -= lr * m_hat / (std::sqrt(v_hat) + config.adam_eps);
    }
  }
}

}  // namespace fpinn
