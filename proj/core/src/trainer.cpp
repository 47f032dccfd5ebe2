// SPDX-License-Identifier: Apache-2.0
#include "fpinn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "fpinn/error.hpp"
#include "fpinn/losses.hpp"
#include "fpinn/serialize.hpp"

namespace fpinn {

namespace {

constexpr int kHeadO = 0;
constexpr int kHeadQ = 1;

std::uint64_t epoch_seed(std::uint64_t seed, int epoch) {
  return (seed << 32) ^ static_cast<std::uint64_t>(epoch + 1);
}

/// Linear map from head features to a matrix: offset + Σ f_k·basis_k.
struct AffineLayout {
  ComplexMatrix offset;
  std::vector<ComplexMatrix> basis;

  static AffineLayout of(const FeatureLayout& layout) {
    AffineLayout a{ComplexMatrix::zero(layout.dim()), {}};
    for (int k = 0; k < layout.n_features(); ++k) a.basis.push_back(layout.basis(k));
    return a;
  }
  static AffineLayout of(const DensityLayout& layout) {
    AffineLayout a{layout.to_density(std::vector<double>(layout.n_features(), 0.0)), {}};
    for (int k = 0; k < layout.n_features(); ++k) a.basis.push_back(layout.basis(k));
    return a;
  }

  ComplexMatrix at(const Eigen::MatrixXd& features, Eigen::Index col) const {
    ComplexMatrix m = offset;
    for (std::size_t k = 0; k < basis.size(); ++k) m += features(static_cast<Eigen::Index>(k), col) * basis[k];
    return m;
  }
};

/// L_ini on the first grid column, accumulating its gradient into `adjoint`.
double add_initial_loss(const AffineLayout& layout, const HeadTrace& head, const ComplexMatrix& target,
                        HeadTrace& adjoint) {
  const ComplexMatrix diff = layout.at(head.value, 0) - target;
  for (std::size_t k = 0; k < layout.basis.size(); ++k) {
    adjoint.value(static_cast<Eigen::Index>(k), 0) += 2.0 * real_inner(diff, layout.basis[k]);
  }
  return loss_ini(layout.at(head.value, 0), target);
}

double add_regularizer(const HeadTrace& head, const TrainConfig& config, HeadTrace& adjoint) {
  const HeadLossGrad er = evolution_regularizer(head.value, config.lambda_er, config.tau);
  adjoint.value += er.grad.value;
  return er.value;
}

void check_finite(const LossBreakdown& b, const char* phase) {
  if (!std::isfinite(b.total)) {
    std::ostringstream msg;
    msg << phase << " training: non-finite loss at epoch " << b.epoch;
    throw NumericalError(msg.str());
  }
}

struct Assembled {
  LossBreakdown losses;
  std::vector<HeadTrace> adjoints;
};

Assembled assemble_operator_losses(const std::vector<HeadTrace>& heads, const SystemSpec& spec,
                                   const TrainConfig& config) {
  const HeadTrace& o = heads.at(kHeadO);
  const HeadTrace& q = heads.at(kHeadQ);
  Assembled out;
  const OperatorModLoss mod_o = loss_mod_operator(OperatorHead::kO, o, q, spec, true);
  const OperatorModLoss mod_q = loss_mod_operator(OperatorHead::kQ, o, q, spec, true);
  out.adjoints = {mod_o.grad_self, mod_q.grad_self};
  // Detached cross terms contribute nothing, but keep the accounting honest.
  out.adjoints[kHeadQ].value += mod_o.grad_cross.value;
  out.adjoints[kHeadO].value += mod_q.grad_cross.value;

  const ComplexMatrix zero = ComplexMatrix::zero(spec.dim);
  const double ini_o = add_initial_loss(AffineLayout::of(spec.o_layout), o, zero, out.adjoints[kHeadO]);
  const double ini_q = add_initial_loss(AffineLayout::of(spec.q_layout), q, zero, out.adjoints[kHeadQ]);
  const double er_o = add_regularizer(o, config, out.adjoints[kHeadO]);
  const double er_q = add_regularizer(q, config, out.adjoints[kHeadQ]);

  LossBreakdown& b = out.losses;
  b.mod = {mod_o.value, mod_q.value};
  b.ini = {ini_o, ini_q};
  b.er = {er_o, er_q};
  b.total = b.sum_of_parts();
  return out;
}

Assembled assemble_rho_losses(const HeadTrace& rho, const RhoResidual& residual,
                              const AffineLayout& layout, const ComplexMatrix& rho0,
                              const TrainConfig& config) {
  Assembled out;
  const HeadLossGrad mod = residual.loss_mod(rho);
  out.adjoints = {mod.grad};
  const double ini = add_initial_loss(layout, rho, rho0, out.adjoints[0]);
  const double er = add_regularizer(rho, config, out.adjoints[0]);
  out.losses.mod = {mod.value};
  out.losses.ini = {ini};
  out.losses.er = {er};
  out.losses.total = out.losses.sum_of_parts();
  return out;
}

void require_operator_network(const NetworkConfig& c, const SystemSpec& spec) {
  if (c.architecture == Architecture::kPlain) {
    throw ValidationError("operator training needs a two-headed architecture, got plain");
  }
  if (c.out_features != operator_head_sizes(spec)) {
    throw ValidationError("operator network head sizes do not match the system's operator layouts");
  }
}

void require_rho_network(const NetworkConfig& c, const SystemSpec& spec) {
  if (c.out_features.size() != 1 || c.out_features[0] != spec.rho_layout.n_features()) {
    throw ValidationError("rho network must have one head with " +
                          std::to_string(spec.rho_layout.n_features()) + " outputs");
  }
}

std::vector<ComplexMatrix> prior_values(const Trajectory& prior, const TimeGrid& grid, const char* what) {
  if (!(prior.grid == grid) || static_cast<int>(prior.values.size()) != grid.size()) {
    throw ValidationError(std::string(what) + " prior is not sampled on the training grid");
  }
  return prior.values;
}

Json system_summary(const SystemSpec& spec) {
  Json j = {{"name", spec.name}, {"dim", spec.dim}, {"bath", to_json(spec.bath)}};
  if (spec.kind == ModelKind::kXxz) {
    j["J"] = spec.coupling_j;
    j["delta"] = spec.anisotropy;
  }
  return j;
}

/// Shared epoch loop. `assemble` maps head traces to losses and adjoints.
template <typename Assemble>
TrainResult run_training(const char* phase, const NetworkConfig& net_config,
                         const TrainConfig& config, const TimeGrid& grid, Json snapshot,
                         const Assemble& assemble, const EpochObserver& observer) {
  const auto start = std::chrono::steady_clock::now();
  auto [params, network] = Network::build(net_config);
  AdamW optimizer(params);
  RunRecord record;
  record.phase = phase;
  record.config = std::move(snapshot);
  record.history.reserve(static_cast<std::size_t>(config.t_max));

  for (int epoch = 0; epoch < config.t_max; ++epoch) {
    const double lr = cosine_lr(epoch, config);
    Tape tape;
    Assembled step;
    try {
      step = assemble(
          network.forward(params, grid.times(), RunMode::training(epoch_seed(config.seed, epoch)), &tape));
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << phase << " training: non-finite loss at epoch " << epoch << " (" << e.what() << ")";
      throw NumericalError(msg.str());
    }
    step.losses.epoch = epoch;
    step.losses.lr = lr;
    check_finite(step.losses, phase);
    const ParamStore grads = network.backward(tape, step.adjoints);
    optimizer.step(params, grads, lr, config);
    if (observer) observer(step.losses);
    record.history.push_back(std::move(step.losses));
  }

  Assembled final_step = assemble(network.forward(params, grid.times(), RunMode::eval()));
  final_step.losses.epoch = config.t_max;
  final_step.losses.lr = 0.0;
  record.final_eval = std::move(final_step.losses);
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {Model{std::move(network), std::move(params)}, std::move(record)};
}

}  // namespace

double LossBreakdown::sum_of_parts() const {
  double s = 0.0;
  for (double v : mod) s += v;
  for (double v : ini) s += v;
  for (double v : er) s += v;
  return s;
}

std::vector<int> operator_head_sizes(const SystemSpec& spec) {
  return {spec.o_layout.n_features(), spec.q_layout.n_features()};
}

TrainResult train_operators(const SystemSpec& spec, const NetworkConfig& net_config,
                            const TrainConfig& train_config, const TimeGrid& grid,
                            const EpochObserver& observer) {
  net_config.validate();
  train_config.validate();
  require_operator_network(net_config, spec);
  if (grid.size() < 1) throw ValidationError("train_operators: empty grid");

  Json snapshot = {{"system", system_summary(spec)},
                   {"network", to_json(net_config)},
                   {"train", to_json(train_config)},
                   {"grid", to_json(grid)},
                   {"loss_normalization", "L_mod is the mean over all N_t grid points"}};
  const auto assemble = [&](const std::vector<HeadTrace>& heads) {
    return assemble_operator_losses(heads, spec, train_config);
  };
  return run_training("operators", net_config, train_config, grid, std::move(snapshot), assemble,
                      observer);
}

TrainResult train_rho(const SystemSpec& spec, const ComplexMatrix& rho0, const Trajectory& o_prior,
                      const Trajectory& q_prior, const NetworkConfig& net_config,
                      const TrainConfig& train_config, const TimeGrid& grid,
                      const EpochObserver& observer) {
  net_config.validate();
  train_config.validate();
  require_rho_network(net_config, spec);
  if (rho0.dim() != spec.dim) throw ValidationError("train_rho: rho0 dimension does not match system");
  const RhoResidual residual(spec, prior_values(o_prior, grid, "O"), prior_values(q_prior, grid, "Q"));
  const AffineLayout layout = AffineLayout::of(spec.rho_layout);

  Json snapshot = {{"system", system_summary(spec)},
                   {"network", to_json(net_config)},
                   {"train", to_json(train_config)},
                   {"grid", to_json(grid)},
                   {"loss_normalization", "L_mod is the mean over all N_t grid points"}};
  const auto assemble = [&](const std::vector<HeadTrace>& heads) {
    return assemble_rho_losses(heads.at(0), residual, layout, rho0, train_config);
  };
  return run_training("rho", net_config, train_config, grid, std::move(snapshot), assemble, observer);
}

LossBreakdown operator_losses(const Model& model, const SystemSpec& spec,
                              const TrainConfig& train_config, const TimeGrid& grid) {
  require_operator_network(model.network.config(), spec);
  const auto heads = model.network.forward(model.params, grid.times(), RunMode::eval());
  return assemble_operator_losses(heads, spec, train_config).losses;
}

LossBreakdown rho_losses(const Model& model, const SystemSpec& spec, const ComplexMatrix& rho0,
                         const Trajectory& o_prior, const Trajectory& q_prior,
                         const TrainConfig& train_config, const TimeGrid& grid) {
  require_rho_network(model.network.config(), spec);
  const RhoResidual residual(spec, prior_values(o_prior, grid, "O"), prior_values(q_prior, grid, "Q"));
  const auto heads = model.network.forward(model.params, grid.times(), RunMode::eval());
  return assemble_rho_losses(heads.at(0), residual, AffineLayout::of(spec.rho_layout), rho0, train_config)
      .losses;
}

OperatorPrediction predict_operators(const Model& model, const SystemSpec& spec, const TimeGrid& grid) {
  require_operator_network(model.network.config(), spec);
  const auto heads = model.network.forward(model.params, grid.times(), RunMode::eval());
  const AffineLayout o_layout = AffineLayout::of(spec.o_layout);
  const AffineLayout q_layout = AffineLayout::of(spec.q_layout);
  OperatorPrediction out{{grid, {}}, {grid, {}}};
  for (int i = 0; i < grid.size(); ++i) {
    out.o.values.push_back(o_layout.at(heads[kHeadO].value, i));
    out.q.values.push_back(q_layout.at(heads[kHeadQ].value, i));
  }
  return out;
}

Trajectory predict_rho(const Model& model, const SystemSpec& spec, const TimeGrid& grid) {
  require_rho_network(model.network.config(), spec);
  const auto heads = model.network.forward(model.params, grid.times(), RunMode::eval());
  const AffineLayout layout = AffineLayout::of(spec.rho_layout);
  Trajectory out{grid, {}};
  for (int i = 0; i < grid.size(); ++i) out.values.push_back(layout.at(heads[0].value, i));
  return out;
}

}  // namespace fpinn
