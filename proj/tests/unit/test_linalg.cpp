// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include <gtest/gtest.h>

#include "fpinn/error.hpp"
#include "fpinn/linalg.hpp"
#include "test_support.hpp"

namespace fpinn {
namespace {

using testing::Gen;
using testing::MatrixNear;

const Complex kI(0.0, 1.0);

TEST(Commutator, PauliAlgebra) {
  EXPECT_TRUE(MatrixNear(commutator(pauli::z(), pauli::x()), 2.0 * kI * pauli::y(), 0.0));
  EXPECT_TRUE(MatrixNear(commutator(pauli::x(), pauli::y()), 2.0 * kI * pauli::z(), 0.0));
  const ComplexMatrix a = Gen(1).matrix(3);
  EXPECT_EQ(commutator(a, a), ComplexMatrix::zero(3));
}

TEST(Commutator, DimensionMismatchThrows) {
  EXPECT_THROW(commutator(ComplexMatrix::identity(2), ComplexMatrix::identity(4)), ValidationError);
}

TEST(Commutator, AntisymmetricAndTraceless) {
  Gen g(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = g.integer(1, 4);
    const ComplexMatrix a = g.matrix(d, 3.0);
    const ComplexMatrix b = g.matrix(d, 3.0);
    EXPECT_EQ(commutator(a, b), -commutator(b, a));
    EXPECT_LE(std::abs(commutator(a, b).trace()), 1e-12);
  }
}

TEST(FrobeniusNorm, Examples) {
  EXPECT_DOUBLE_EQ(frobenius_norm(ComplexMatrix::identity(2)), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(frobenius_norm(ComplexMatrix{0.0, Complex(1, 1), 0.0, 0.0}), std::sqrt(2.0));
  EXPECT_EQ(frobenius_norm(ComplexMatrix::zero(4)), 0.0);
}

TEST(FrobeniusNorm, MatchesEntrySum) {
  Gen g(11);
  for (int trial = 0; trial < 100; ++trial) {
    const ComplexMatrix a = g.matrix(g.integer(1, 4), 5.0);
    double sum = 0.0;
    for (int i = 0; i < a.dim(); ++i)
      for (int j = 0; j < a.dim(); ++j) sum += std::norm(a(i, j));
    EXPECT_NEAR(frobenius_norm(a) * frobenius_norm(a), sum, 1e-12 * sum);
    EXPECT_NEAR(real_inner(a, a), sum, 1e-12 * sum);
  }
}

TEST(Kron, Examples) {
  EXPECT_EQ(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
  EXPECT_EQ(kron(pauli::z(), ComplexMatrix::identity(2)), ComplexMatrix::diagonal({1.0, 1.0, -1.0, -1.0}));
  // σy⊗σy = [[0,0,0,-1],[0,0,1,0],[0,1,0,0],[-1,0,0,0]]
  ComplexMatrix yy(4);
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  EXPECT_EQ(kron(pauli::y(), pauli::y()), yy);
}

TEST(Kron, RejectsOversizedResult) {
  EXPECT_THROW(kron(ComplexMatrix::identity(4), ComplexMatrix::identity(2)), ValidationError);
}

TEST(Eigen, DiagonalAndPauli) {
  const Spectrum d = hermitian_eigendecompose(ComplexMatrix::diagonal({1.0, 3.0}));
  EXPECT_DOUBLE_EQ(d.eigenvalues[0], 3.0);
  EXPECT_DOUBLE_EQ(d.eigenvalues[1], 1.0);

  const Spectrum x = hermitian_eigendecompose(pauli::x());
  EXPECT_NEAR(x.eigenvalues[0], 1.0, 1e-14);
  EXPECT_NEAR(x.eigenvalues[1], -1.0, 1e-14);
  // Eigenvectors are (|0⟩ ± |1⟩)/√2 up to a phase.
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(x.eigenvectors(0, 0)), s, 1e-14);
  EXPECT_NEAR(std::abs(x.eigenvectors(1, 0)), s, 1e-14);
  EXPECT_NEAR(std::abs(x.eigenvectors(0, 0) - x.eigenvectors(1, 0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(x.eigenvectors(0, 1) + x.eigenvectors(1, 1)), 0.0, 1e-14);
}

TEST(Eigen, ComplexTwoByTwo) {
  // λ² − 4λ + 2 = 0
  const ComplexMatrix a{2.0, Complex(1, -1), Complex(1, 1), 2.0};
  const Spectrum s = hermitian_eigendecompose(a);
  EXPECT_NEAR(s.eigenvalues[0], 2.0 + std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(s.eigenvalues[1], 2.0 - std::sqrt(2.0), 1e-14);
}

TEST(Eigen, RejectsNonHermitian) {
  EXPECT_THROW(hermitian_eigendecompose(ComplexMatrix{0.0, 1.0, 0.0, 0.0}), ValidationError);
}

TEST(Eigen, RandomReconstructionAndOrthonormality) {
  Gen g(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int d = g.integer(1, 4);
    const ComplexMatrix a = g.hermitian(d, std::pow(10.0, g.uniform(-3.0, 3.0)));
    const Spectrum s = hermitian_eigendecompose(a);
    const double scale = std::max(1.0, frobenius_norm(a));
    EXPECT_TRUE(MatrixNear(reconstruct(s), a, 1e-10 * scale));
    EXPECT_TRUE(MatrixNear(s.eigenvectors.adjoint() * s.eigenvectors, ComplexMatrix::identity(d), 1e-10));
    for (std::size_t i = 1; i < s.eigenvalues.size(); ++i) EXPECT_GE(s.eigenvalues[i - 1], s.eigenvalues[i]);
  }
}

TEST(Eigen, DegenerateSpectrum) {
  Gen g(5);
  const ComplexMatrix u = g.unitary(4);
  const ComplexMatrix a = u * ComplexMatrix::diagonal({2.0, 2.0, -1.0, -1.0}) * u.adjoint();
  const Spectrum s = hermitian_eigendecompose((a + a.adjoint()) * 0.5);
  EXPECT_NEAR(s.eigenvalues[0], 2.0, 1e-12);
  EXPECT_NEAR(s.eigenvalues[1], 2.0, 1e-12);
  EXPECT_NEAR(s.eigenvalues[2], -1.0, 1e-12);
  EXPECT_NEAR(s.eigenvalues[3], -1.0, 1e-12);
}

TEST(HermitianSqrt, Examples) {
  EXPECT_TRUE(MatrixNear(hermitian_sqrt(ComplexMatrix::diagonal({4.0, 9.0})), ComplexMatrix::diagonal({2.0, 3.0}), 1e-14));
  EXPECT_TRUE(MatrixNear(hermitian_sqrt(ComplexMatrix::identity(4)), ComplexMatrix::identity(4), 1e-14));
  const ComplexMatrix proj = ComplexMatrix{1.0, 1.0, 1.0, 1.0} * 0.5;
  EXPECT_TRUE(MatrixNear(hermitian_sqrt(proj), proj, 1e-12));
}

TEST(HermitianSqrt, ClampsRoundOffButRejectsNegative) {
  EXPECT_NO_THROW(hermitian_sqrt(ComplexMatrix::diagonal({1.0, -5e-11})));
  EXPECT_THROW(hermitian_sqrt(ComplexMatrix::diagonal({1.0, -1e-6})), NumericalError);
}

TEST(HermitianSqrt, SquaresBackOnRandomPsd) {
  Gen g(9);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = g.integer(1, 4);
    const ComplexMatrix b = g.matrix(d);
    const ComplexMatrix a = b * b.adjoint();
    const ComplexMatrix s = hermitian_sqrt(a);
    EXPECT_TRUE(is_hermitian(s));
    EXPECT_LE(frobenius_norm(s * s - a), 1e-8 * std::max(1e-300, frobenius_norm(a)));
  }
}

TEST(ComplexMatrix, InitializerMustBeSquare) {
  EXPECT_THROW((ComplexMatrix{1.0, 2.0, 3.0}), ValidationError);
  EXPECT_THROW(ComplexMatrix(5), ValidationError);
}

}  // namespace
}  // namespace fpinn
