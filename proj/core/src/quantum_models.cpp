// SPDX-License-Identifier: Apache-2.0
#include "fpinn/quantum_models.hpp"

#include <cmath>
#include <sstream>

#include "fpinn/error.hpp"

namespace fpinn {

namespace {

void require_dim(const ComplexMatrix& m, int dim, const char* what) {
  if (m.dim() != dim) {
    std::ostringstream msg;
    msg << what << ": expected dimension " << dim << ", got " << m.dim();
    throw ValidationError(msg.str());
  }
}

void require_length(std::span<const double> features, int n, const char* what) {
  if (static_cast<int>(features.size()) != n) {
    std::ostringstream msg;
    msg << what << ": expected " << n << " features, got " << features.size();
    throw ValidationError(msg.str());
  }
}

/// −iH_s − (L†Ō + LQ̄), the generator shared by both auxiliary equations.
ComplexMatrix generator(const ComplexMatrix& o, const ComplexMatrix& q, const SystemSpec& spec) {
  const Complex minus_i(0.0, -1.0);
  return minus_i * spec.hamiltonian - (spec.lindblad.adjoint() * o + spec.lindblad * q);
}

// Upper-triangle (row, col) pairs of a 4x4 matrix in feature order.
constexpr int kUpper[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

}  // namespace

void BathParams::validate() const {
  if (!(coupling > 0.0) || !(gamma > 0.0) || !(temperature > 0.0)) {
    std::ostringstream msg;
    msg << "BathParams: Gamma, gamma and T must be positive (got " << coupling << ", " << gamma
        << ", " << temperature << ")";
    throw ValidationError(msg.str());
  }
}

FeatureLayout::FeatureLayout(int dim, int n_features, std::vector<Placement> placements)
    : dim_(dim), n_features_(n_features), placements_(std::move(placements)) {
  std::vector<bool> used(n_features, false);
  for (const Placement& p : placements_) {
    if (p.row < 0 || p.row >= dim || p.col < 0 || p.col >= dim) {
      throw ValidationError("FeatureLayout: placement outside the matrix");
    }
    for (int idx : {p.re_index, p.im_index}) {
      if (idx < 0 || idx >= n_features) throw ValidationError("FeatureLayout: bad feature index");
      used[idx] = true;
    }
  }
  for (int k = 0; k < n_features; ++k) {
    if (!used[k]) throw ValidationError("FeatureLayout: feature " + std::to_string(k) + " unused");
  }
}

ComplexMatrix FeatureLayout::to_operator(std::span<const double> features) const {
  require_length(features, n_features_, "FeatureLayout::to_operator");
  ComplexMatrix m(dim_);
  for (const Placement& p : placements_) {
    m(p.row, p.col) = Complex(features[p.re_index], features[p.im_index]);
  }
  return m;
}

std::vector<double> FeatureLayout::from_operator(const ComplexMatrix& op) const {
  require_dim(op, dim_, "FeatureLayout::from_operator");
  std::vector<double> f(n_features_, 0.0);
  std::vector<bool> seen(n_features_, false);
  for (const Placement& p : placements_) {
    if (!seen[p.re_index]) f[p.re_index] = op(p.row, p.col).real();
    if (!seen[p.im_index]) f[p.im_index] = op(p.row, p.col).imag();
    seen[p.re_index] = seen[p.im_index] = true;
  }
  return f;
}

ComplexMatrix FeatureLayout::basis(int k) const {
  std::vector<double> unit(n_features_, 0.0);
  unit.at(k) = 1.0;
  return to_operator(unit);
}

double FeatureLayout::off_layout_magnitude(const ComplexMatrix& op) const {
  require_dim(op, dim_, "FeatureLayout::off_layout_magnitude");
  std::vector<bool> touched(dim_ * dim_, false);
  for (const Placement& p : placements_) touched[p.row * dim_ + p.col] = true;
  double worst = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      if (!touched[i * dim_ + j]) worst = std::max(worst, std::abs(op(i, j)));
  return worst;
}

std::vector<std::string> FeatureLayout::feature_names(const std::string& symbol) const {
  std::vector<std::string> names(n_features_);
  for (const Placement& p : placements_) {
    const std::string idx = std::to_string(p.row + 1) + std::to_string(p.col + 1);
    if (names[p.re_index].empty()) names[p.re_index] = "re_" + symbol + idx;
    if (names[p.im_index].empty()) names[p.im_index] = "im_" + symbol + idx;
  }
  return names;
}

DensityLayout::DensityLayout(Mode mode) : mode_(mode) {}

ComplexMatrix DensityLayout::to_density(std::span<const double> f) const {
  require_length(f, n_features(), "features_to_density");
  if (mode_ == Mode::kTwoLevelTriplet) {
    const double p = f[0];
    const Complex c(f[1], f[2]);
    return {p, c, std::conj(c), 1.0 - p};
  }
  ComplexMatrix rho(4);
  const double mean = (f[0] + f[1] + f[2] + f[3]) / 4.0;
  for (int i = 0; i < 4; ++i) rho(i, i) = f[i] - mean + 0.25;
  for (int k = 0; k < 6; ++k) {
    const Complex c(f[4 + 2 * k], f[5 + 2 * k]);
    rho(kUpper[k][0], kUpper[k][1]) = c;
    rho(kUpper[k][1], kUpper[k][0]) = std::conj(c);
  }
  return rho;
}

std::vector<double> DensityLayout::from_density(const ComplexMatrix& rho) const {
  require_dim(rho, dim(), "DensityLayout::from_density");
  if (mode_ == Mode::kTwoLevelTriplet) {
    return {rho(0, 0).real(), rho(0, 1).real(), rho(0, 1).imag()};
  }
  std::vector<double> f(16);
  for (int i = 0; i < 4; ++i) f[i] = rho(i, i).real();
  for (int k = 0; k < 6; ++k) {
    const Complex c = rho(kUpper[k][0], kUpper[k][1]);
    f[4 + 2 * k] = c.real();
    f[5 + 2 * k] = c.imag();
  }
  return f;
}

ComplexMatrix DensityLayout::basis(int k) const {
  std::vector<double> zero(n_features(), 0.0);
  std::vector<double> unit = zero;
  unit.at(k) = 1.0;
  return to_density(unit) - to_density(zero);
}

std::vector<std::string> DensityLayout::feature_names() const {
  if (mode_ == Mode::kTwoLevelTriplet) return {"rho11", "re_rho12", "im_rho12"};
  std::vector<std::string> names = {"rho11", "rho22", "rho33", "rho44"};
  for (const auto& rc : kUpper) {
    const std::string idx = std::to_string(rc[0] + 1) + std::to_string(rc[1] + 1);
    names.push_back("re_rho" + idx);
    names.push_back("im_rho" + idx);
  }
  return names;
}

std::string to_string(DensityLayout::Mode mode) {
  return mode == DensityLayout::Mode::kTwoLevelTriplet ? "two-level-triplet"
                                                       : "hermitian-trace-normalized";
}

SystemSpec spin_boson_spec(const BathParams& bath) {
  bath.validate();
  SystemSpec s;
  s.name = "spin_boson";
  s.kind = ModelKind::kSpinBoson;
  s.dim = 2;
  s.hamiltonian = pauli::z();
  s.lindblad = pauli::x();
  s.bath = bath;
  const std::vector<Placement> offdiag = {{0, 1, 0, 1}, {1, 0, 2, 3}};
  s.o_layout = FeatureLayout(2, 4, offdiag);
  s.q_layout = FeatureLayout(2, 4, offdiag);
  s.rho_layout = DensityLayout(DensityLayout::Mode::kTwoLevelTriplet);
  return s;
}

SystemSpec xxz_spec(double coupling_j, double anisotropy, const BathParams& bath) {
  bath.validate();
  const ComplexMatrix id = ComplexMatrix::identity(2);
  SystemSpec s;
  s.name = "xxz";
  s.kind = ModelKind::kXxz;
  s.dim = 4;
  s.coupling_j = coupling_j;
  s.anisotropy = anisotropy;
  s.hamiltonian = coupling_j * (kron(pauli::x(), pauli::x()) + kron(pauli::y(), pauli::y())) +
                  anisotropy * kron(pauli::z(), pauli::z());
  s.lindblad = kron(pauli::lower(), id) + kron(id, pauli::lower());
  s.bath = bath;
  // Ō lives on the pattern of L, Q̄ on the pattern of L†, with the two
  // single-excitation entries tied.
  s.o_layout = FeatureLayout(4, 4, {{1, 0, 0, 1}, {2, 0, 0, 1}, {3, 1, 2, 3}, {3, 2, 2, 3}});
  s.q_layout = FeatureLayout(4, 4, {{0, 1, 0, 1}, {0, 2, 0, 1}, {1, 3, 2, 3}, {2, 3, 2, 3}});
  s.rho_layout = DensityLayout(DensityLayout::Mode::kHermitianTraceNormalized);
  return s;
}

ComplexMatrix features_to_density(std::span<const double> features, const DensityLayout& layout) {
  return layout.to_density(features);
}

ComplexMatrix features_to_operator(std::span<const double> features, const FeatureLayout& layout) {
  return layout.to_operator(features);
}

ComplexMatrix rhs_O(const ComplexMatrix& o, const ComplexMatrix& q, const SystemSpec& spec) {
  require_dim(o, spec.dim, "rhs_O");
  require_dim(q, spec.dim, "rhs_O");
  const auto& b = spec.bath;
  const Complex drive(b.coupling * b.temperature * b.gamma / 2.0,
                      -b.coupling * b.gamma * b.gamma / 2.0);
  return drive * spec.lindblad - b.gamma * o + commutator(generator(o, q, spec), o);
}

ComplexMatrix rhs_Q(const ComplexMatrix& o, const ComplexMatrix& q, const SystemSpec& spec) {
  require_dim(o, spec.dim, "rhs_Q");
  require_dim(q, spec.dim, "rhs_Q");
  const auto& b = spec.bath;
  const double drive = b.coupling * b.temperature * b.gamma / 2.0;
  return drive * spec.lindblad.adjoint() - b.gamma * q + commutator(generator(o, q, spec), q);
}

ComplexMatrix rhs_rho(const ComplexMatrix& rho, const ComplexMatrix& o, const ComplexMatrix& q,
                      const SystemSpec& spec) {
  require_dim(rho, spec.dim, "rhs_rho");
  require_dim(o, spec.dim, "rhs_rho");
  require_dim(q, spec.dim, "rhs_rho");
  const ComplexMatrix& l = spec.lindblad;
  const ComplexMatrix ld = l.adjoint();
  const Complex minus_i(0.0, -1.0);
  return minus_i * commutator(spec.hamiltonian, rho) + commutator(l, rho * o.adjoint()) -
         commutator(ld, o * rho) + commutator(ld, rho * q.adjoint()) - commutator(l, q * rho);
}

ComplexMatrix rhs_O_dO(const ComplexMatrix& o, const ComplexMatrix& q, const ComplexMatrix& d_o,
                       const SystemSpec& spec) {
  require_dim(d_o, spec.dim, "rhs_O_dO");
  return -spec.bath.gamma * d_o + commutator(generator(o, q, spec), d_o) -
         commutator(spec.lindblad.adjoint() * d_o, o);
}

ComplexMatrix rhs_O_dQ(const ComplexMatrix& o, const ComplexMatrix& /*q*/,
                       const ComplexMatrix& d_q, const SystemSpec& spec) {
  require_dim(d_q, spec.dim, "rhs_O_dQ");
  return -commutator(spec.lindblad * d_q, o);
}

ComplexMatrix rhs_Q_dO(const ComplexMatrix& /*o*/, const ComplexMatrix& q,
                       const ComplexMatrix& d_o, const SystemSpec& spec) {
  require_dim(d_o, spec.dim, "rhs_Q_dO");
  return -commutator(spec.lindblad.adjoint() * d_o, q);
}

ComplexMatrix rhs_Q_dQ(const ComplexMatrix& o, const ComplexMatrix& q, const ComplexMatrix& d_q,
                       const SystemSpec& spec) {
  require_dim(d_q, spec.dim, "rhs_Q_dQ");
  return -spec.bath.gamma * d_q + commutator(generator(o, q, spec), d_q) -
         commutator(spec.lindblad * d_q, q);
}

ComplexMatrix ket0_state() { return ComplexMatrix::diagonal({1.0, 0.0}); }

ComplexMatrix ket00_state() { return ComplexMatrix::diagonal({1.0, 0.0, 0.0, 0.0}); }

ComplexMatrix bell_state() {
  ComplexMatrix rho(4);
  rho(0, 0) = rho(0, 3) = rho(3, 0) = rho(3, 3) = 0.5;
  return rho;
}

}  // namespace fpinn
