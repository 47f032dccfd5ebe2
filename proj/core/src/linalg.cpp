// SPDX-License-Identifier: Apache-2.0
#include "fpinn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "fpinn/error.hpp"

namespace fpinn {

namespace {

void require_dim(int dim) {
  if (dim < 1 || dim > ComplexMatrix::kMaxDim) {
    throw ValidationError("ComplexMatrix: dimension " + std::to_string(dim) +
                          " outside supported range 1..4");
  }
}

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (a.dim() != b.dim()) {
    std::ostringstream msg;
    msg << op << ": dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
    throw ValidationError(msg.str());
  }
}

double off_diagonal_norm(const ComplexMatrix& a) {
  double sum = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      if (i != j) sum += std::norm(a(i, j));
  return std::sqrt(sum);
}

}  // namespace

ComplexMatrix::ComplexMatrix(int dim) : dim_(dim) { require_dim(dim); }

ComplexMatrix::ComplexMatrix(std::initializer_list<Complex> entries) {
  const auto n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(entries.size()))));
  if (n * n != static_cast<int>(entries.size())) {
    throw ValidationError("ComplexMatrix: initializer size is not a perfect square");
  }
  require_dim(n);
  dim_ = n;
  int k = 0;
  for (const Complex& v : entries) {
    (*this)(k / n, k % n) = v;
    ++k;
  }
}

ComplexMatrix ComplexMatrix::identity(int dim) {
  ComplexMatrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::initializer_list<Complex> diag) {
  ComplexMatrix m(static_cast<int>(diag.size()));
  int i = 0;
  for (const Complex& v : diag) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix r(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) r(i, j) = std::conj((*this)(j, i));
  return r;
}

ComplexMatrix ComplexMatrix::conj() const {
  ComplexMatrix r(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) r(i, j) = std::conj((*this)(i, j));
  return r;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix r(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) r(i, j) = (*this)(j, i);
  return r;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

bool ComplexMatrix::all_finite() const {
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) {
      const Complex& v = (*this)(i, j);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
  return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
  require_same_dim(*this, rhs, "operator+");
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) (*this)(i, j) += rhs(i, j);
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
  require_same_dim(*this, rhs, "operator-");
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) (*this)(i, j) -= rhs(i, j);
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) (*this)(i, j) *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "operator*");
  const int n = a.dim();
  ComplexMatrix r(n);
  // Plain real arithmetic: std::complex's operator* carries an inf/NaN
  // recovery branch that dominates the cost at these sizes.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double re = 0.0;
      double im = 0.0;
      for (int k = 0; k < n; ++k) {
        const Complex x = a(i, k);
        const Complex y = b(k, j);
        re += x.real() * y.real() - x.imag() * y.imag();
        im += x.real() * y.imag() + x.imag() * y.real();
      }
      r(i, j) = Complex(re, im);
    }
  return r;
}

bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) return false;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

std::ostream& operator<<(std::ostream& os, const ComplexMatrix& m) {
  os << '[';
  for (int i = 0; i < m.dim(); ++i) {
    os << (i ? ", [" : "[");
    for (int j = 0; j < m.dim(); ++j) os << (j ? ", " : "") << m(i, j);
    os << ']';
  }
  return os << ']';
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "commutator");
  return a * b - b * a;
}

double frobenius_norm(const ComplexMatrix& a) {
  double sum = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) sum += std::norm(a(i, j));
  return std::sqrt(sum);
}

double real_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "real_inner");
  double sum = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      sum += a(i, j).real() * b(i, j).real() + a(i, j).imag() * b(i, j).imag();
  return sum;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const int n = a.dim() * b.dim();
  if (n > ComplexMatrix::kMaxDim) {
    throw ValidationError("kron: result dimension " + std::to_string(n) +
                          " exceeds the supported maximum of 4");
  }
  ComplexMatrix r(n);
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      for (int k = 0; k < b.dim(); ++k)
        for (int l = 0; l < b.dim(); ++l) r(i * b.dim() + k, j * b.dim() + l) = a(i, j) * b(k, l);
  return r;
}

bool is_hermitian(const ComplexMatrix& a, double rel_tol) {
  return frobenius_norm(a - a.adjoint()) <= rel_tol * std::max(1.0, frobenius_norm(a));
}

Spectrum hermitian_eigendecompose(const ComplexMatrix& input) {
  if (!is_hermitian(input)) {
    throw ValidationError("hermitian_eigendecompose: input is not Hermitian");
  }
  constexpr int kMaxSweeps = 100;
  constexpr double kOffTolerance = 1e-14;

  const int n = input.dim();
  // Symmetrize so the rotations act on an exactly Hermitian matrix.
  ComplexMatrix a = (input + input.adjoint()) * 0.5;
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = std::max(1.0, frobenius_norm(a));

  int sweep = 0;
  for (; sweep < kMaxSweeps && off_diagonal_norm(a) >= kOffTolerance * scale; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const Complex b = a(p, q);
        const double mag = std::abs(b);
        if (mag == 0.0) continue;
        // Phase e^{-iφ} on column q makes the pivot real, then a real
        // symmetric Schur rotation zeroes it.
        const Complex phase = std::conj(b) / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Block of the unitary G restricted to (p, q).
        const Complex gpp = c, gpq = s;
        const Complex gqp = -s * phase, gqq = c * phase;

        for (int k = 0; k < n; ++k) {  // A <- A G
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
        }
        for (int k = 0; k < n; ++k) {  // A <- G† A
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        for (int k = 0; k < n; ++k) {  // V <- V G
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }
  const double residual = off_diagonal_norm(a);
  if (residual >= kOffTolerance * scale) {
    std::ostringstream msg;
    msg << "hermitian_eigendecompose: no convergence after " << sweep
        << " sweeps, off-diagonal residual " << residual;
    throw NumericalError(msg.str());
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i).real() > a(j, j).real(); });
  Spectrum out{std::vector<double>(n), ComplexMatrix(n)};
  for (int k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (int r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
  }
  return out;
}

ComplexMatrix reconstruct(const Spectrum& s) {
  const int n = s.eigenvectors.dim();
  ComplexMatrix r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Complex sum = 0.0;
      for (int k = 0; k < n; ++k)
        sum += s.eigenvectors(i, k) * s.eigenvalues[k] * std::conj(s.eigenvectors(j, k));
      r(i, j) = sum;
    }
  return r;
}

ComplexMatrix hermitian_sqrt(const ComplexMatrix& a) {
  constexpr double kClampFloor = -1e-10;
  Spectrum s = hermitian_eigendecompose(a);
  for (double& lambda : s.eigenvalues) {
    if (lambda < kClampFloor) {
      std::ostringstream msg;
      msg << "hermitian_sqrt: eigenvalue " << lambda << " below clamp floor " << kClampFloor;
      throw NumericalError(msg.str());
    }
    lambda = std::sqrt(std::max(lambda, 0.0));
  }
  return reconstruct(s);
}

namespace pauli {
ComplexMatrix x() { return {0.0, 1.0, 1.0, 0.0}; }
ComplexMatrix y() { return {0.0, Complex(0, -1), Complex(0, 1), 0.0}; }
ComplexMatrix z() { return {1.0, 0.0, 0.0, -1.0}; }
ComplexMatrix lower() { return {0.0, 0.0, 1.0, 0.0}; }
ComplexMatrix raise() { return {0.0, 1.0, 0.0, 0.0}; }
}  // namespace pauli

}  // namespace fpinn
