#include "stroma/solver.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stroma {

void SolveSettings::validate() const {
  if (!(tolerance > 0.0)) throw ConfigError("solver tolerance must be positive");
  if (!(force_floor > 0.0)) throw ConfigError("solver force floor must be positive");
  if (max_newton_iterations < 1) throw ConfigError("max Newton iterations must be >= 1");
  if (max_relaxation_iterations < 1) throw ConfigError("max relaxation iterations must be >= 1");
  if (!(pseudo_time_step > 0.0)) throw ConfigError("pseudo time step must be positive");
  if (!(velocity_tolerance > 0.0)) throw ConfigError("velocity tolerance must be positive");
  if (mass_update_interval < 1 || divergence_window < 1 || history_stride < 1) {
    throw ConfigError("relaxation intervals must be >= 1");
  }
}

double estimate_omega0(const Eigen::VectorXd& du, const Eigen::VectorXd& t_k, const Eigen::VectorXd& t_km1,
                       const Eigen::VectorXd& mass, double previous) {
  const double den = du.dot(mass.cwiseProduct(du));
  if (!(den > 0.0)) return previous;
  const double w2 = du.dot(t_k - t_km1) / den;
  return std::sqrt(std::max(w2, 0.0));
}

double element_density(double e_modulus, double h, double dt) {
  if (!(e_modulus > 0.0) || !(h > 0.0) || !(dt > 0.0)) throw DomainError("element density needs E, h, dt > 0");
  return e_modulus * dt * dt / (h * h);
}

namespace {

struct Residual {
  Eigen::VectorXd r;
  double norm = 0.0;
  double external = 0.0;
};

Residual evaluate(NonlinearSystem& system, const Eigen::VectorXd& q, bool allow_nonfinite = false) {
  Eigen::VectorXd t, f;
  system.forces(q, t, f);
  Residual out;
  out.r = t - f;
  out.norm = out.r.norm();
  out.external = f.norm();
  if (!std::isfinite(out.norm)) {
    if (!allow_nonfinite) throw SolverError("residual is not finite");
    out.norm = std::numeric_limits<double>::infinity();
  }
  return out;
}

bool converged(const Residual& res, const SolveSettings& s) {
  return res.norm <= s.tolerance * std::max(res.external, s.force_floor);
}

}  // namespace

SolveResult newton_solve(NonlinearSystem& system, Eigen::VectorXd q0, const SolveSettings& settings) {
  settings.validate();
  SolveResult out;
  out.q = std::move(q0);
  Residual res = evaluate(system, out.q);
  for (int k = 0;; ++k) {
    out.history.push_back({k, res.norm, 0.0});
    out.iterations = k;
    out.residual = res.norm;
    out.external_norm = res.external;
    if (converged(res, settings)) return out;
    if (k >= settings.max_newton_iterations) {
      std::ostringstream os;
      os << "Newton-Raphson did not converge in " << k << " iterations (residual " << res.norm << ")";
      throw SolverError(os.str());
    }

    Eigen::SparseMatrix<double> kt = system.tangent(out.q);
    kt.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(kt);
    if (lu.info() != Eigen::Success) {
      throw SolverError("singular tangent stiffness; try the dynamic relaxation solver");
    }
    const Eigen::VectorXd dq = lu.solve(res.r);
    if (lu.info() != Eigen::Success || !dq.allFinite()) {
      throw SolverError("singular tangent stiffness; try the dynamic relaxation solver");
    }

    // Backtrack on residual growth, element inversion or a non-physical state; keep the best trial.
    double step = 1.0;
    bool have_best = false;
    Residual best;
    Eigen::VectorXd best_q;
    for (int ls = 0; ls < 10; ++ls, step *= 0.5) {
      const Eigen::VectorXd trial = out.q - step * dq;
      try {
        Residual r = evaluate(system, trial, true);
        if (!std::isfinite(r.norm)) continue;
        if (!have_best || r.norm < best.norm) {
          best = std::move(r);
          best_q = trial;
          have_best = true;
        }
        if (best.norm < res.norm) break;
      } catch (const InvertedElementError&) {
      } catch (const DomainError&) {
      }
    }
    if (!have_best) throw SolverError("Newton step inverts elements or leaves the material domain at every line-search length");
    out.q = std::move(best_q);
    res = std::move(best);
  }
}

SolveResult dynamic_relaxation_solve(NonlinearSystem& system, Eigen::VectorXd q0, const SolveSettings& settings) {
  settings.validate();
  const double dt = settings.pseudo_time_step;
  SolveResult out;
  out.q = std::move(q0);
  Eigen::VectorXd mass = system.fictitious_mass(out.q, dt);
  if (!(mass.minCoeff() > 0.0)) throw SolverError("fictitious masses must be positive");

  Residual res = evaluate(system, out.q);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(out.q.size());
  double omega = 0.0;
  double window_residual = res.norm;
  double last_step = std::numeric_limits<double>::infinity();
  const double initial_norm = res.norm;
  double best_norm = res.norm;
  Eigen::VectorXd best_q = out.q;
  int restarts = 0;

  for (long it = 0;; ++it) {
    const bool still = last_step <= settings.velocity_tolerance * std::max(out.q.cwiseAbs().maxCoeff(), 1e-3);
    const bool done = converged(res, settings) && (it == 0 ? res.norm == 0.0 : still);
    if (done || it % settings.history_stride == 0) out.history.push_back({it, res.norm, omega});
    out.iterations = it;
    out.residual = res.norm;
    out.external_norm = res.external;
    if (done) return out;
    if (it >= settings.max_relaxation_iterations) {
      std::ostringstream os;
      os << "dynamic relaxation did not converge in " << it << " iterations (residual " << res.norm << ")";
      throw SolverError(os.str());
    }

    const double c = std::min(2.0 * omega * dt, 2.0);
    v = ((2.0 - c) * v - 2.0 * dt * res.r.cwiseQuotient(mass)) / (2.0 + c);
    const Eigen::VectorXd dq = dt * v;
    out.q += dq;
    last_step = dq.cwiseAbs().maxCoeff();

    Residual next;
    bool unstable = false;
    try {
      next = evaluate(system, out.q, true);
      unstable = !std::isfinite(next.norm) || next.norm > std::max(1e3 * best_norm, 10.0 * initial_norm);
    } catch (const InvertedElementError&) {
      unstable = true;
    } catch (const DomainError&) {
      unstable = true;
    }
    if (unstable) {
      // Masses lag a stiffening state: restart from the best state with heavier nodes.
      if (++restarts > 20) throw SolverError("dynamic relaxation unstable; reduce the pseudo time step");
      out.q = best_q;
      v.setZero();
      omega = 0.0;
      last_step = std::numeric_limits<double>::infinity();
      mass = system.fictitious_mass(out.q, dt).cwiseMax(2.0 * mass);
      res = evaluate(system, out.q);
      continue;
    }
    omega = estimate_omega0(dq, next.r, res.r, mass, omega);
    res = std::move(next);
    if (res.norm < best_norm) {
      best_norm = res.norm;
      best_q = out.q;
    }

    if ((it + 1) % settings.mass_update_interval == 0) mass = system.fictitious_mass(out.q, dt);
    if ((it + 1) % settings.divergence_window == 0) {
      if (res.norm > 10.0 * window_residual) {
        throw SolverError("dynamic relaxation diverging; reduce the pseudo time step");
      }
      window_residual = res.norm;
    }
  }
}

}  // namespace stroma
