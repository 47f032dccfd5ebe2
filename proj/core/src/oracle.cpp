// SPDX-License-Identifier: Apache-2.0
#include "fpinn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fpinn/error.hpp"

namespace fpinn {

namespace {

State axpy(const State& y, double a, const State& k) {
  State r = y;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += a * k[i];
  return r;
}

void require_finite(const State& s, double t, const char* stage) {
  for (const ComplexMatrix& m : s) {
    if (!m.all_finite()) {
      std::ostringstream msg;
      msg << "rk4_step: non-finite value in stage " << stage << " at t = " << t;
      throw NumericalError(msg.str());
    }
  }
}

double min_eigenvalue(const ComplexMatrix& rho) {
  const ComplexMatrix herm = (rho + rho.adjoint()) * 0.5;
  return hermitian_eigendecompose(herm).eigenvalues.back();
}

void check_initial_state(const ComplexMatrix& rho0, int dim) {
  if (rho0.dim() != dim) throw ValidationError("initial state has the wrong dimension");
  if (!is_hermitian(rho0)) throw ValidationError("initial state is not Hermitian");
  if (std::abs(rho0.trace() - 1.0) > 1e-10) throw ValidationError("initial state trace != 1");
  if (min_eigenvalue(rho0) < -1e-10) throw ValidationError("initial state is not PSD");
}

constexpr double kPsdWarnFloor = -1e-6;

}  // namespace

TimeGrid::TimeGrid(int n_points, double t_total) : n_points_(n_points), t_total_(t_total) {
  if (n_points < 1) throw ValidationError("TimeGrid: need at least one sample point");
  if (!(t_total > 0.0)) throw ValidationError("TimeGrid: T_tot must be positive");
  times_.resize(n_points);
  for (int i = 0; i < n_points; ++i) {
    times_[i] = n_points > 1 ? i * t_total / (n_points - 1) : 0.0;
  }
}

double TimeGrid::operator[](int i) const { return times_.at(i); }

State rk4_step(const State& y, double t, double dt, const JointRhs& rhs) {
  if (!(dt > 0.0)) throw ValidationError("rk4_step: dt must be positive");
  const State k1 = rhs(t, y);
  require_finite(k1, t, "k1");
  const State k2 = rhs(t + 0.5 * dt, axpy(y, 0.5 * dt, k1));
  require_finite(k2, t, "k2");
  const State k3 = rhs(t + 0.5 * dt, axpy(y, 0.5 * dt, k2));
  require_finite(k3, t, "k3");
  const State k4 = rhs(t + dt, axpy(y, dt, k3));
  require_finite(k4, t, "k4");
  State out = y;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  require_finite(out, t + dt, "update");
  return out;
}

OracleResult integrate_system(const SystemSpec& spec, const ComplexMatrix& rho0,
                              const TimeGrid& grid, int substeps) {
  if (substeps < 1) throw ValidationError("integrate_system: substeps must be >= 1");
  check_initial_state(rho0, spec.dim);

  const JointRhs rhs = [&spec](double, const State& y) {
    return State{rhs_O(y[0], y[1], spec), rhs_Q(y[0], y[1], spec), rhs_rho(y[2], y[0], y[1], spec)};
  };

  OracleResult out;
  out.o.grid = out.q.grid = out.rho.grid = grid;
  State y{ComplexMatrix::zero(spec.dim), ComplexMatrix::zero(spec.dim), rho0};
  out.min_rho_eigenvalue = min_eigenvalue(rho0);
  const auto record = [&](const State& s) {
    out.o.values.push_back(s[0]);
    out.q.values.push_back(s[1]);
    out.rho.values.push_back(s[2]);
  };
  record(y);

  const double dt = grid.step() / substeps;
  for (int i = 0; i + 1 < grid.size(); ++i) {
    for (int k = 0; k < substeps; ++k) y = rk4_step(y, grid[i] + k * dt, dt, rhs);
    record(y);
    const double lowest = min_eigenvalue(y[2]);
    out.min_rho_eigenvalue = std::min(out.min_rho_eigenvalue, lowest);
    if (lowest < kPsdWarnFloor) {
      std::ostringstream msg;
      msg << "rho left the PSD cone at t = " << grid[i + 1] << " (min eigenvalue " << lowest << ")";
      out.warnings.push_back(msg.str());
    }
  }
  return out;
}

ComplexMatrix interpolate(const Trajectory& traj, double t) {
  const int n = traj.grid.size();
  if (static_cast<int>(traj.values.size()) != n || n == 0) {
    throw ValidationError("interpolate: trajectory length does not match its grid");
  }
  if (n == 1) return traj.values[0];
  const double h = traj.grid.step();
  const double pos = std::clamp(t / h, 0.0, static_cast<double>(n - 1));
  const int i = std::min(static_cast<int>(pos), n - 2);
  const double u = pos - i;

  const auto at = [&](int k) -> ComplexMatrix {
    if (k < 0) return 2.0 * traj.values[0] - traj.values[1];
    if (k >= n) return 2.0 * traj.values[n - 1] - traj.values[n - 2];
    return traj.values[k];
  };
  const ComplexMatrix p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
  const double u2 = u * u, u3 = u2 * u;
  return p1 + (0.5 * u) * (p2 - p0) + u2 * (p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3) +
         u3 * (-0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3);
}

Trajectory integrate_rho_with_priors(const SystemSpec& spec, const ComplexMatrix& rho0,
                                     const Trajectory& o_prior, const Trajectory& q_prior,
                                     const TimeGrid& grid, int substeps) {
  if (substeps < 1) throw ValidationError("integrate_rho_with_priors: substeps must be >= 1");
  check_initial_state(rho0, spec.dim);
  for (const Trajectory* prior : {&o_prior, &q_prior}) {
    const TimeGrid& pg = prior->grid;
    const bool same_span = std::abs(pg.t_total() - grid.t_total()) <= 1e-12 * grid.t_total();
    const bool refines = grid.size() == 1 ||
                         (pg.size() >= grid.size() && (pg.size() - 1) % (grid.size() - 1) == 0);
    if (!same_span || !refines || static_cast<int>(prior->values.size()) != pg.size()) {
      throw ValidationError("integrate_rho_with_priors: prior grid is not compatible with target grid");
    }
  }

  const JointRhs rhs = [&](double t, const State& y) {
    return State{rhs_rho(y[0], interpolate(o_prior, t), interpolate(q_prior, t), spec)};
  };

  Trajectory out{grid, {rho0}};
  State y{rho0};
  const double dt = grid.step() / substeps;
  for (int i = 0; i + 1 < grid.size(); ++i) {
    for (int k = 0; k < substeps; ++k) y = rk4_step(y, grid[i] + k * dt, dt, rhs);
    out.values.push_back(y[0]);
  }
  return out;
}

}  // namespace fpinn
