// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fpinn/linalg.hpp"
#include "fpinn/oracle.hpp"

namespace fpinn {

/// (1/N) Σ_i ‖pred(t_i) − ref(t_i)‖_F.
double avg_frobenius_error(const Trajectory& pred, const Trajectory& ref);

/// Uhlmann fidelity [tr √(√ρ σ √ρ)]². Eigenvalues down to −1e-6 are clamped
/// to zero and the state renormalized; anything lower throws NumericalError.
double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma);

/// Grid average of fidelity(pred(t_i), ref(t_i)).
double avg_fidelity(const Trajectory& pred, const Trajectory& ref);

/// l1 coherence Σ_{i≠j} |ρ_ij|.
double coherence_l1(const ComplexMatrix& rho);

/// Wootters concurrence of a two-qubit state.
double concurrence(const ComplexMatrix& rho);

/// Re tr(ρ·O); throws NumericalError if the imaginary part exceeds 1e-10.
double expectation(const ComplexMatrix& rho, const ComplexMatrix& observable);

/// Clamps eigenvalues in [−1e-6, 0) to zero and renormalizes to unit trace.
ComplexMatrix physical_state(const ComplexMatrix& rho);

}  // namespace fpinn
