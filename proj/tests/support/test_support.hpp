// SPDX-License-Identifier: Apache-2.0
// Shared helpers for the test binaries: seeded generators for random
// matrices and states, and tolerance assertions on ComplexMatrix.
#pragma once

#include <cmath>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "fpinn/linalg.hpp"

namespace fpinn::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  ComplexMatrix matrix(int dim, double scale = 1.0) {
    ComplexMatrix m(dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m(i, j) = Complex(scale * uniform(), scale * uniform());
    return m;
  }

  ComplexMatrix hermitian(int dim, double scale = 1.0) {
    const ComplexMatrix a = matrix(dim, scale);
    return (a + a.adjoint()) * 0.5;
  }

  /// G·G† / tr, a full-rank density matrix.
  ComplexMatrix density(int dim) {
    const ComplexMatrix g = matrix(dim);
    const ComplexMatrix p = g * g.adjoint();
    return p * (1.0 / p.trace().real());
  }

  /// exp(iH) for a random Hermitian H via its spectrum.
  ComplexMatrix unitary(int dim) {
    const Spectrum s = hermitian_eigendecompose(hermitian(dim, 3.0));
    ComplexMatrix d(dim);
    for (int i = 0; i < dim; ++i) d(i, i) = std::polar(1.0, s.eigenvalues[static_cast<std::size_t>(i)]);
    return s.eigenvectors * d * s.eigenvectors.adjoint();
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline ::testing::AssertionResult MatrixNear(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  if (a.dim() != b.dim()) {
    return ::testing::AssertionFailure() << "dims differ: " << a.dim() << " vs " << b.dim();
  }
  const double err = frobenius_norm(a - b);
  if (err <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "||a - b||_F = " << err << " > " << tol << "\na = " << a << "\nb = " << b;
}

inline double relative_error(double a, double b, double floor = 1e-12) {
  return std::abs(a - b) / std::max(floor, std::max(std::abs(a), std::abs(b)));
}

}  // namespace fpinn::testing
