// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fpinn/linalg.hpp"
#include "fpinn/quantum_models.hpp"

namespace fpinn {

/// Uniform grid t_i = i·T_tot/(N_t − 1), i = 0..N_t−1, starting at t₀ = 0.
class TimeGrid {
 public:
  TimeGrid() = default;
  TimeGrid(int n_points, double t_total);

  int size() const { return n_points_; }
  double t_total() const { return t_total_; }
  /// Spacing between samples; zero for a single-point grid.
  double step() const { return n_points_ > 1 ? t_total_ / (n_points_ - 1) : 0.0; }
  double operator[](int i) const;
  const std::vector<double>& times() const { return times_; }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.n_points_ == b.n_points_ && a.t_total_ == b.t_total_;
  }

 private:
  int n_points_ = 0;
  double t_total_ = 0.0;
  std::vector<double> times_;
};

/// A matrix-valued quantity sampled on a grid.
struct Trajectory {
  TimeGrid grid;
  std::vector<ComplexMatrix> values;
};

using State = std::vector<ComplexMatrix>;
/// Joint derivative of a stacked state at time t.
using JointRhs = std::function<State(double t, const State& y)>;

/// One classical RK4 step of size dt starting at time t.
/// Throws NumericalError if any stage produces non-finite entries.
State rk4_step(const State& y, double t, double dt, const JointRhs& rhs);

struct OracleResult {
  Trajectory o;
  Trajectory q;
  Trajectory rho;
  /// Smallest eigenvalue of ρ seen at any grid point.
  double min_rho_eigenvalue = 0.0;
  /// Non-fatal diagnostics, such as ρ drifting outside the PSD cone.
  std::vector<std::string> warnings;
};

/// Integrates (Ō, Q̄, ρ) jointly from Ō = Q̄ = 0, using `substeps` RK4 steps
/// per grid interval.
OracleResult integrate_system(const SystemSpec& spec, const ComplexMatrix& rho0,
                              const TimeGrid& grid, int substeps = 8);

/// Integrates the master equation alone with Ō, Q̄ supplied as sampled priors.
/// The prior grid must span the same interval and be the target grid or a
/// uniform refinement of it; values between samples use Catmull-Rom cubics.
Trajectory integrate_rho_with_priors(const SystemSpec& spec, const ComplexMatrix& rho0,
                                     const Trajectory& o_prior, const Trajectory& q_prior,
                                     const TimeGrid& grid, int substeps = 8);

/// Catmull-Rom interpolation of a sampled trajectory, with linear extrapolation
/// of ghost points at both ends.
ComplexMatrix interpolate(const Trajectory& traj, double t);

}  // namespace fpinn
