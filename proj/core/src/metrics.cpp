// SPDX-License-Identifier: Apache-2.0
#include "fpinn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fpinn/error.hpp"

namespace fpinn {

namespace {

constexpr double kPhysicalFloor = -1e-6;

void require_same_grid(const Trajectory& a, const Trajectory& b, const char* what) {
  if (!(a.grid == b.grid) || a.values.size() != b.values.size() ||
      static_cast<int>(a.values.size()) != a.grid.size()) {
    throw ValidationError(std::string(what) + ": trajectories are not on the same grid");
  }
}

}  // namespace

ComplexMatrix physical_state(const ComplexMatrix& rho) {
  if (!is_hermitian(rho, 1e-8)) throw NumericalError("density matrix is not Hermitian");
  Spectrum s = hermitian_eigendecompose((rho + rho.adjoint()) * 0.5);
  double trace = 0.0;
  for (double& lambda : s.eigenvalues) {
    if (lambda < kPhysicalFloor) {
      std::ostringstream msg;
      msg << "unphysical density matrix: eigenvalue " << lambda << " below " << kPhysicalFloor;
      throw NumericalError(msg.str());
    }
    lambda = std::max(lambda, 0.0);
    trace += lambda;
  }
  if (!(trace > 0.0)) throw NumericalError("density matrix has zero trace");
  for (double& lambda : s.eigenvalues) lambda /= trace;
  return reconstruct(s);
}

double avg_frobenius_error(const Trajectory& pred, const Trajectory& ref) {
  require_same_grid(pred, ref, "avg_frobenius_error");
  if (pred.values.empty()) throw ValidationError("avg_frobenius_error: empty trajectory");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) sum += frobenius_norm(pred.values[i] - ref.values[i]);
  return sum / static_cast<double>(pred.values.size());
}

double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  const ComplexMatrix a = physical_state(rho);
  const ComplexMatrix b = physical_state(sigma);
  const ComplexMatrix root = hermitian_sqrt(a);
  ComplexMatrix inner = root * b * root;
  inner = (inner + inner.adjoint()) * 0.5;
  const Spectrum s = hermitian_eigendecompose(inner);
  double tr = 0.0;
  for (double lambda : s.eigenvalues) tr += std::sqrt(std::max(lambda, 0.0));
  return tr * tr;
}

double avg_fidelity(const Trajectory& pred, const Trajectory& ref) {
  require_same_grid(pred, ref, "avg_fidelity");
  if (pred.values.empty()) throw ValidationError("avg_fidelity: empty trajectory");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) sum += fidelity(pred.values[i], ref.values[i]);
  return sum / static_cast<double>(pred.values.size());
}

double coherence_l1(const ComplexMatrix& rho) {
  double sum = 0.0;
  for (int i = 0; i < rho.dim(); ++i)
    for (int j = 0; j < rho.dim(); ++j)
      if (i != j) sum += std::abs(rho(i, j));
  return sum;
}

double concurrence(const ComplexMatrix& rho) {
  if (rho.dim() != 4) throw ValidationError("concurrence: two-qubit (4x4) state required");
  const ComplexMatrix state = physical_state(rho);
  const ComplexMatrix yy = kron(pauli::y(), pauli::y());
  const ComplexMatrix flipped = yy * state.conj() * yy;
  const ComplexMatrix root = hermitian_sqrt(state);
  // √ρ·ρ̃·√ρ is Hermitian and similar to ρ·ρ̃, so it carries the same spectrum.
  ComplexMatrix m = root * flipped * root;
  m = (m + m.adjoint()) * 0.5;
  const Spectrum s = hermitian_eigendecompose(m);
  std::vector<double> roots;
  for (double lambda : s.eigenvalues) roots.push_back(std::sqrt(std::max(lambda, 0.0)));
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return std::max(0.0, roots[0] - roots[1] - roots[2] - roots[3]);
}

double expectation(const ComplexMatrix& rho, const ComplexMatrix& observable) {
  const Complex v = (rho * observable).trace();
  if (std::abs(v.imag()) > 1e-10) {
    std::ostringstream msg;
    msg << "expectation: imaginary part " << v.imag() << " exceeds 1e-10";
    throw NumericalError(msg.str());
  }
  return v.real();
}

}  // namespace fpinn
