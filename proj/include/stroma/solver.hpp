#pragma once

#include "stroma/common.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <vector>

namespace stroma {

/// Discrete equilibrium problem R(q) = T(q) - F(q) = 0 in generalized coordinates.
class NonlinearSystem {
 public:
  virtual ~NonlinearSystem() = default;

  virtual int size() const = 0;
  /// Internal forces T(q) and external forces F(q); F may depend on q (follower loads).
  virtual void forces(const Eigen::VectorXd& q, Eigen::VectorXd& internal, Eigen::VectorXd& external) = 0;
  /// dR/dq.
  virtual Eigen::SparseMatrix<double> tangent(const Eigen::VectorXd& q) = 0;
  /// Positive diagonal fictitious mass for dynamic relaxation with pseudo time step dt.
  virtual Eigen::VectorXd fictitious_mass(const Eigen::VectorXd& q, double dt) = 0;
};

struct SolveSettings {
  double tolerance = 1e-6;     ///< ||R|| <= tolerance * max(||F||, force_floor)
  double force_floor = 1e-6;   ///< [N]
  int max_newton_iterations = 50;
  long max_relaxation_iterations = 2'000'000;
  double pseudo_time_step = 1e-3;
  /// Relaxation also requires max |dq| per step <= velocity_tolerance * max(max |q|, 1e-3).
  double velocity_tolerance = 1e-6;
  long mass_update_interval = 2000;
  long divergence_window = 10'000;
  long history_stride = 100;  ///< relaxation iterations between history records

  void validate() const;
};

struct IterationRecord {
  long iteration = 0;
  double residual = 0.0;
  double omega0 = 0.0;  ///< relaxation only
};

struct SolveResult {
  Eigen::VectorXd q;
  long iterations = 0;
  double residual = 0.0;
  double external_norm = 0.0;
  std::vector<IterationRecord> history;
};

/// Newton-Raphson with a sparse LU solve and a backtracking line search.
/// Throws SolverError on a singular tangent or when the iteration limit is hit.
SolveResult newton_solve(NonlinearSystem& system, Eigen::VectorXd q0, const SolveSettings& settings);

/// Critically damped dynamic relaxation,
///   M q'' + 2 w0 M q' + T(q) = F(q),
/// integrated by central differences with w0 re-estimated every step from the
/// Rayleigh ratio of the last increment. Throws SolverError on divergence.
SolveResult dynamic_relaxation_solve(NonlinearSystem& system, Eigen::VectorXd q0, const SolveSettings& settings);

/// w0^2 = max(du^T (T_k - T_{k-1}) / du^T M du, 0). Returns `previous` when du = 0.
double estimate_omega0(const Eigen::VectorXd& du, const Eigen::VectorXd& t_k, const Eigen::VectorXd& t_km1,
                       const Eigen::VectorXd& mass, double previous = 0.0);

/// Fictitious density rho_e = E_e dt^2 / h_e^2.
double element_density(double e_modulus, double h, double dt);

}  // namespace stroma
