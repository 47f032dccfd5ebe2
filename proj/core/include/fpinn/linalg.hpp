// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <vector>

namespace fpinn {

using Complex = std::complex<double>;

/// Dense row-major complex matrix of dimension 1..4.
///
/// Every operator in the library (Ō, Q̄, ρ, H_s, L) lives in a 2- or 4-level
/// Hilbert space, so storage is a fixed 16-entry array and the type is a
/// cheap value.
class ComplexMatrix {
 public:
  static constexpr int kMaxDim = 4;

  ComplexMatrix() = default;
  explicit ComplexMatrix(int dim);
  /// Row-major initializer; the entry count must be a perfect square <= 16.
  ComplexMatrix(std::initializer_list<Complex> entries);

  static ComplexMatrix zero(int dim) { return ComplexMatrix(dim); }
  static ComplexMatrix identity(int dim);
  static ComplexMatrix diagonal(std::initializer_list<Complex> diag);

  int dim() const { return dim_; }
  Complex& operator()(int row, int col) { return data_[row * kMaxDim + col]; }
  const Complex& operator()(int row, int col) const { return data_[row * kMaxDim + col]; }

  ComplexMatrix adjoint() const;
  ComplexMatrix conj() const;
  ComplexMatrix transpose() const;
  Complex trace() const;
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  ComplexMatrix& operator*=(Complex s);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator-(ComplexMatrix a) { return a *= -1.0; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
  friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b);

 private:
  int dim_ = 0;
  std::array<Complex, kMaxDim * kMaxDim> data_{};
};

std::ostream& operator<<(std::ostream& os, const ComplexMatrix& m);

/// Eigenpairs of a Hermitian matrix; eigenvalues descending, eigenvectors as
/// orthonormal columns in the same order.
struct Spectrum {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;
};

/// AB - BA. Throws ValidationError on dimension mismatch.
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

double frobenius_norm(const ComplexMatrix& a);

/// Re tr(A† B), the real inner product that makes the Frobenius norm Euclidean.
double real_inner(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// ‖A − A†‖_F <= 1e-10 · max(1, ‖A‖_F).
bool is_hermitian(const ComplexMatrix& a, double rel_tol = 1e-10);

/// Cyclic complex Jacobi. Throws ValidationError for non-Hermitian input and
/// NumericalError if 100 sweeps do not reduce the off-diagonal mass below 1e-14.
Spectrum hermitian_eigendecompose(const ComplexMatrix& a);

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// [-1e-10, 0) are treated as zero; anything lower throws NumericalError.
ComplexMatrix hermitian_sqrt(const ComplexMatrix& a);

/// V·diag(λ)·V†.
ComplexMatrix reconstruct(const Spectrum& s);

namespace pauli {
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
/// |1⟩⟨0| in the σ_z|0⟩ = +|0⟩ convention.
ComplexMatrix lower();
/// |0⟩⟨1|.
ComplexMatrix raise();
}  // namespace pauli

}  // namespace fpinn
