// SPDX-License-Identifier: Apache-2.0
#include "fpinn/losses.hpp"

#include <cmath>

#include "fpinn/error.hpp"

namespace fpinn {

namespace {

std::vector<ComplexMatrix> bases(const FeatureLayout& layout) {
  std::vector<ComplexMatrix> out;
  for (int k = 0; k < layout.n_features(); ++k) out.push_back(layout.basis(k));
  return out;
}

ComplexMatrix combine(const std::vector<ComplexMatrix>& basis, const ComplexMatrix& offset,
                      const Eigen::MatrixXd& features, Eigen::Index col) {
  ComplexMatrix m = offset;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double f = features(static_cast<Eigen::Index>(k), col);
    if (f != 0.0) m += f * basis[k];
  }
  return m;
}

void require_trace(const HeadTrace& t, int features, Eigen::Index samples, const char* what) {
  if (t.value.rows() != features || t.rate.rows() != features || t.value.cols() != samples ||
      t.rate.cols() != samples) {
    throw ValidationError(std::string(what) + ": head trace shape does not match layout/grid");
  }
}

HeadTrace zeros_like(const HeadTrace& t) {
  return {Eigen::MatrixXd::Zero(t.value.rows(), t.value.cols()),
          Eigen::MatrixXd::Zero(t.rate.rows(), t.rate.cols())};
}

}  // namespace

OperatorModLoss loss_mod_operator(OperatorHead head, const HeadTrace& o, const HeadTrace& q,
                                  const SystemSpec& spec, bool detach_cross) {
  const Eigen::Index n = o.value.cols();
  require_trace(o, spec.o_layout.n_features(), n, "loss_mod_operator");
  require_trace(q, spec.q_layout.n_features(), n, "loss_mod_operator");
  if (n == 0) throw ValidationError("loss_mod_operator: empty grid");

  const auto o_basis = bases(spec.o_layout);
  const auto q_basis = bases(spec.q_layout);
  const ComplexMatrix zero = ComplexMatrix::zero(spec.dim);
  const bool is_o = head == OperatorHead::kO;
  const auto& self_basis = is_o ? o_basis : q_basis;
  const auto& cross_basis = is_o ? q_basis : o_basis;
  const HeadTrace& self = is_o ? o : q;

  OperatorModLoss out;
  out.grad_self = zeros_like(self);
  out.grad_cross = zeros_like(is_o ? q : o);
  const double scale = 1.0 / static_cast<double>(n);

  for (Eigen::Index i = 0; i < n; ++i) {
    const ComplexMatrix om = combine(o_basis, zero, o.value, i);
    const ComplexMatrix qm = combine(q_basis, zero, q.value, i);
    const ComplexMatrix rate = combine(self_basis, zero, self.rate, i);
    const ComplexMatrix residual = rate - (is_o ? rhs_O(om, qm, spec) : rhs_Q(om, qm, spec));
    const double r2 = frobenius_norm(residual);
    out.value += scale * r2 * r2;

    for (std::size_t k = 0; k < self_basis.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      const ComplexMatrix d_self = is_o ? rhs_O_dO(om, qm, self_basis[k], spec)
                                        : rhs_Q_dQ(om, qm, self_basis[k], spec);
      out.grad_self.rate(kk, i) = 2.0 * scale * real_inner(residual, self_basis[k]);
      out.grad_self.value(kk, i) = -2.0 * scale * real_inner(residual, d_self);
    }
    if (!detach_cross) {
      for (std::size_t k = 0; k < cross_basis.size(); ++k) {
        const ComplexMatrix d_cross = is_o ? rhs_O_dQ(om, qm, cross_basis[k], spec)
                                           : rhs_Q_dO(om, qm, cross_basis[k], spec);
        out.grad_cross.value(static_cast<Eigen::Index>(k), i) =
            -2.0 * scale * real_inner(residual, d_cross);
      }
    }
  }
  return out;
}

RhoResidual::RhoResidual(const SystemSpec& spec, std::vector<ComplexMatrix> o_prior,
                         std::vector<ComplexMatrix> q_prior)
    : layout_(spec.rho_layout) {
  if (o_prior.size() != q_prior.size() || o_prior.empty()) {
    throw ValidationError("RhoResidual: priors must be non-empty and of equal length");
  }
  const int nf = layout_.n_features();
  for (int k = 0; k < nf; ++k) basis_.push_back(layout_.basis(k));
  const ComplexMatrix constant = layout_.to_density(std::vector<double>(nf, 0.0));
  for (std::size_t i = 0; i < o_prior.size(); ++i) {
    offset_.push_back(rhs_rho(constant, o_prior[i], q_prior[i], spec));
    std::vector<ComplexMatrix> per_feature;
    for (int k = 0; k < nf; ++k) per_feature.push_back(rhs_rho(basis_[k], o_prior[i], q_prior[i], spec));
    f_basis_.push_back(std::move(per_feature));
  }
}

HeadLossGrad RhoResidual::loss_mod(const HeadTrace& rho) const {
  const Eigen::Index n = points();
  require_trace(rho, layout_.n_features(), n, "RhoResidual::loss_mod");
  HeadLossGrad out{0.0, zeros_like(rho)};
  const double scale = 1.0 / static_cast<double>(n);
  const ComplexMatrix zero = ComplexMatrix::zero(layout_.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    const ComplexMatrix rate = combine(basis_, zero, rho.rate, i);
    const ComplexMatrix drive = combine(f_basis_[i], offset_[i], rho.value, i);
    const ComplexMatrix residual = rate - drive;
    const double r = frobenius_norm(residual);
    out.value += scale * r * r;
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      out.grad.rate(kk, i) = 2.0 * scale * real_inner(residual, basis_[k]);
      out.grad.value(kk, i) = -2.0 * scale * real_inner(residual, f_basis_[i][k]);
    }
  }
  return out;
}

double loss_ini(const ComplexMatrix& value_at_t0, const ComplexMatrix& target) {
  const double d = frobenius_norm(value_at_t0 - target);
  return d * d;
}

double total_variation(const Eigen::MatrixXd& features) {
  const Eigen::Index n = features.cols();
  if (n < 2) throw ValidationError("total_variation: need at least two samples");
  double sum = 0.0;
  for (Eigen::Index i = 1; i < n; ++i) sum += (features.col(i) - features.col(i - 1)).lpNorm<1>();
  return sum / static_cast<double>(n - 1);
}

Eigen::MatrixXd total_variation_grad(const Eigen::MatrixXd& features) {
  const Eigen::Index n = features.cols();
  if (n < 2) throw ValidationError("total_variation: need at least two samples");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(features.rows(), n);
  const double scale = 1.0 / static_cast<double>(n - 1);
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index k = 0; k < features.rows(); ++k) {
      const double d = features(k, i) - features(k, i - 1);
      const double s = d > 0.0 ? scale : (d < 0.0 ? -scale : 0.0);
      g(k, i) += s;
      g(k, i - 1) -= s;
    }
  }
  return g;
}

double loss_er(double tv, double lambda_er, double tau) {
  if (!(tau > 0.0)) throw ValidationError("loss_er: tau must be positive");
  return lambda_er * std::exp(-tv / tau);
}

HeadLossGrad evolution_regularizer(const Eigen::MatrixXd& features, double lambda_er, double tau) {
  HeadLossGrad out;
  out.grad.rate = Eigen::MatrixXd::Zero(features.rows(), features.cols());
  if (lambda_er == 0.0 || features.cols() < 2) {
    out.grad.value = Eigen::MatrixXd::Zero(features.rows(), features.cols());
    return out;
  }
  const double tv = total_variation(features);
  out.value = loss_er(tv, lambda_er, tau);
  out.grad.value = (-out.value / tau) * total_variation_grad(features);
  return out;
}

}  // namespace fpinn
