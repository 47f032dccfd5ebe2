// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpinn/network.hpp"
#include "fpinn/optim.hpp"
#include "fpinn/oracle.hpp"
#include "fpinn/quantum_models.hpp"

namespace fpinn {

/// Loss terms of one epoch. Per-head vectors are ordered like the network
/// heads: (Ō, Q̄) for the operator phase, (ρ) for the density phase.
struct LossBreakdown {
  int epoch = 0;
  double lr = 0.0;
  double total = 0.0;
  std::vector<double> mod;
  std::vector<double> ini;
  std::vector<double> er;

  double sum_of_parts() const;
};

/// Persisted outcome of one training phase.
struct RunRecord {
  std::string phase;  ///< "operators" or "rho"
  nlohmann::json config;
  std::vector<LossBreakdown> history;
  /// Losses of the trained network in eval mode (no dropout).
  LossBreakdown final_eval;
  std::string checkpoint;
  double wall_seconds = 0.0;
};

struct Model {
  Network network;
  ParamStore params;
};

struct TrainResult {
  Model model;
  RunRecord record;
};

using EpochObserver = std::function<void(const LossBreakdown&)>;

/// Phase 1: full-batch training of a two-headed (Ō, Q̄) network against
/// L_mod + L_ini + L_er per head, with the cross head detached in L_mod.
TrainResult train_operators(const SystemSpec& spec, const NetworkConfig& net_config,
                            const TrainConfig& train_config, const TimeGrid& grid,
                            const EpochObserver& observer = {});

/// Phase 2: trains a single-head ρ network with the operator trajectories
/// held fixed as priors. Priors must be sampled on `grid`.
TrainResult train_rho(const SystemSpec& spec, const ComplexMatrix& rho0, const Trajectory& o_prior,
                      const Trajectory& q_prior, const NetworkConfig& net_config,
                      const TrainConfig& train_config, const TimeGrid& grid,
                      const EpochObserver& observer = {});

/// Eval-mode loss breakdown of an operator network on a grid.
LossBreakdown operator_losses(const Model& model, const SystemSpec& spec,
                              const TrainConfig& train_config, const TimeGrid& grid);

/// Eval-mode loss breakdown of a ρ network on a grid.
LossBreakdown rho_losses(const Model& model, const SystemSpec& spec, const ComplexMatrix& rho0,
                         const Trajectory& o_prior, const Trajectory& q_prior,
                         const TrainConfig& train_config, const TimeGrid& grid);

struct OperatorPrediction {
  Trajectory o;
  Trajectory q;
};

/// Eval-mode Ō, Q̄ on the grid.
OperatorPrediction predict_operators(const Model& model, const SystemSpec& spec,
                                     const TimeGrid& grid);

/// Eval-mode ρ on the grid.
Trajectory predict_rho(const Model& model, const SystemSpec& spec, const TimeGrid& grid);

/// Network config used for the operator phase of a system: two heads sized by
/// the operator layouts.
std::vector<int> operator_head_sizes(const SystemSpec& spec);

}  // namespace fpinn
