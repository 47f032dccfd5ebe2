// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "fpinn/linalg.hpp"

namespace fpinn {

/// Bath parameters Γ (coupling), γ (inverse memory time) and T (temperature),
/// in ħ = k_B = 1 units.
struct BathParams {
  double coupling = 0.1;
  double gamma = 0.3;
  double temperature = 20.0;

  void validate() const;

  friend bool operator==(const BathParams&, const BathParams&) = default;
};

/// One matrix entry driven by a pair of real features.
struct Placement {
  int row = 0;
  int col = 0;
  int re_index = 0;
  int im_index = 0;
};

/// Real-linear map from a feature vector to an operator. Several placements
/// may share feature indices, which ties those entries together.
class FeatureLayout {
 public:
  FeatureLayout() = default;
  FeatureLayout(int dim, int n_features, std::vector<Placement> placements);

  int dim() const { return dim_; }
  int n_features() const { return n_features_; }
  const std::vector<Placement>& placements() const { return placements_; }

  ComplexMatrix to_operator(std::span<const double> features) const;
  /// Reads each feature from the first placement that uses it.
  std::vector<double> from_operator(const ComplexMatrix& op) const;
  /// ∂(operator)/∂feature_k.
  ComplexMatrix basis(int k) const;
  /// Largest modulus over entries that no placement touches.
  double off_layout_magnitude(const ComplexMatrix& op) const;
  /// Column names such as re_O12 / im_O12 (1-based indices).
  std::vector<std::string> feature_names(const std::string& symbol) const;

 private:
  int dim_ = 0;
  int n_features_ = 0;
  std::vector<Placement> placements_;
};

/// Parametrization of a density matrix that is Hermitian with unit trace by
/// construction.
class DensityLayout {
 public:
  enum class Mode {
    kTwoLevelTriplet,           ///< [ρ11, Re ρ12, Im ρ12]
    kHermitianTraceNormalized,  ///< 4 shifted diagonal + 12 upper-triangle features
  };

  DensityLayout() = default;
  explicit DensityLayout(Mode mode);

  Mode mode() const { return mode_; }
  int dim() const { return mode_ == Mode::kTwoLevelTriplet ? 2 : 4; }
  int n_features() const { return mode_ == Mode::kTwoLevelTriplet ? 3 : 16; }

  ComplexMatrix to_density(std::span<const double> features) const;
  std::vector<double> from_density(const ComplexMatrix& rho) const;
  /// ∂ρ/∂feature_k; the map is affine, so this is feature-independent.
  ComplexMatrix basis(int k) const;
  std::vector<std::string> feature_names() const;

 private:
  Mode mode_ = Mode::kTwoLevelTriplet;
};

std::string to_string(DensityLayout::Mode mode);

enum class ModelKind { kSpinBoson, kXxz };

/// A benchmark system: H_s, L, bath and the feature layouts used by the nets.
struct SystemSpec {
  std::string name;
  ModelKind kind = ModelKind::kSpinBoson;
  int dim = 2;
  ComplexMatrix hamiltonian;
  ComplexMatrix lindblad;
  BathParams bath;
  double coupling_j = 0.0;  ///< XXZ in-plane coupling J
  double anisotropy = 0.0;  ///< XXZ Δ
  FeatureLayout o_layout;
  FeatureLayout q_layout;
  DensityLayout rho_layout;
};

/// H_s = σ_z, L = σ_x.
SystemSpec spin_boson_spec(const BathParams& bath);

/// H = J(σx⊗σx + σy⊗σy) + Δ σz⊗σz, L = σ⁻⊗I + I⊗σ⁻.
SystemSpec xxz_spec(double coupling_j, double anisotropy, const BathParams& bath);

ComplexMatrix features_to_density(std::span<const double> features, const DensityLayout& layout);
ComplexMatrix features_to_operator(std::span<const double> features, const FeatureLayout& layout);

/// dŌ/dt = (ΓTγ/2 − iΓγ²/2) L − γŌ + [−iH_s − (L†Ō + LQ̄), Ō].
ComplexMatrix rhs_O(const ComplexMatrix& o, const ComplexMatrix& q, const SystemSpec& spec);

/// dQ̄/dt = (ΓTγ/2) L† − γQ̄ + [−iH_s − (L†Ō + LQ̄), Q̄].
ComplexMatrix rhs_Q(const ComplexMatrix& o, const ComplexMatrix& q, const SystemSpec& spec);

/// dρ/dt = −i[H_s, ρ] + [L, ρŌ†] − [L†, Ōρ] + [L†, ρQ̄†] − [L, Q̄ρ].
/// Linear in ρ; no physicality check is made on ρ.
ComplexMatrix rhs_rho(const ComplexMatrix& rho, const ComplexMatrix& o, const ComplexMatrix& q,
                      const SystemSpec& spec);

/// Directional derivatives of rhs_O / rhs_Q along perturbations of either operator.
ComplexMatrix rhs_O_dO(const ComplexMatrix& o, const ComplexMatrix& q, const ComplexMatrix& d_o,
                       const SystemSpec& spec);
ComplexMatrix rhs_O_dQ(const ComplexMatrix& o, const ComplexMatrix& q, const ComplexMatrix& d_q,
                       const SystemSpec& spec);
ComplexMatrix rhs_Q_dO(const ComplexMatrix& o, const ComplexMatrix& q, const ComplexMatrix& d_o,
                       const SystemSpec& spec);
ComplexMatrix rhs_Q_dQ(const ComplexMatrix& o, const ComplexMatrix& q, const ComplexMatrix& d_q,
                       const SystemSpec& spec);

/// Named initial states.
ComplexMatrix ket0_state();
ComplexMatrix ket00_state();
ComplexMatrix bell_state();

}  // namespace fpinn
