// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Core>

#include "fpinn/linalg.hpp"
#include "fpinn/network.hpp"
#include "fpinn/quantum_models.hpp"

namespace fpinn {

/// A loss value with its gradient on the head outputs it reads.
struct HeadLossGrad {
  double value = 0.0;
  HeadTrace grad;  ///< same shape as the head trace, zero where unused
};

struct OperatorModLoss {
  double value = 0.0;
  HeadTrace grad_self;
  /// Gradient on the other operator head; all zeros when detached.
  HeadTrace grad_cross;
};

/// Which auxiliary equation a dynamics loss enforces.
enum class OperatorHead { kO, kQ };

/// Mean over grid points of ‖dA/dt − F_A(Ō, Q̄)‖²_F for A = Ō or Q̄.
/// With detach_cross the other operator enters as a constant.
OperatorModLoss loss_mod_operator(OperatorHead head, const HeadTrace& o, const HeadTrace& q,
                                  const SystemSpec& spec, bool detach_cross = true);

/// ρ-dynamics residual with the auxiliary operators supplied as constants.
/// Precomputes F_ρ on the density basis at every grid point, since F_ρ is
/// linear in ρ and the priors never change during training.
class RhoResidual {
 public:
  RhoResidual(const SystemSpec& spec, std::vector<ComplexMatrix> o_prior,
              std::vector<ComplexMatrix> q_prior);

  HeadLossGrad loss_mod(const HeadTrace& rho) const;
  int points() const { return static_cast<int>(offset_.size()); }

 private:
  DensityLayout layout_;
  std::vector<ComplexMatrix> basis_;          // ∂ρ/∂f_k
  std::vector<ComplexMatrix> offset_;         // F_ρ(ρ(f = 0)) per point
  std::vector<std::vector<ComplexMatrix>> f_basis_;  // F_ρ(∂ρ/∂f_k) per point
};

/// ‖A(t₀) − target‖²_F.
double loss_ini(const ComplexMatrix& value_at_t0, const ComplexMatrix& target);

/// (1/(N−1)) Σ_i ‖f(t_i) − f(t_{i−1})‖₁ over a features × samples trajectory.
double total_variation(const Eigen::MatrixXd& features);

/// Subgradient of total_variation (sign(0) = 0).
Eigen::MatrixXd total_variation_grad(const Eigen::MatrixXd& features);

/// λ_er · exp(−TV/τ).
double loss_er(double tv, double lambda_er, double tau);

/// L_er of a features × samples trajectory with its gradient on the values.
HeadLossGrad evolution_regularizer(const Eigen::MatrixXd& features, double lambda_er, double tau);

}  // namespace fpinn
