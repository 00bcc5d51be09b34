#pragma once

#include "stroma/dof_map.hpp"
#include "stroma/elements.hpp"
#include "stroma/solver.hpp"
#include "stroma/unit_cell.hpp"

#include <vector>

namespace stroma {

/// Fictitious-mass recipe for dynamic relaxation.
struct MassSettings {
  /// Hex density from rho_e = E_e dt^2 / h_e^2 with E_e = K + 4 mu / 3 and h_e the shortest edge.
  double hex_safety = 4.0;
  /// Each truss adds safety * max(alpha, |beta|) dt^2 / 2 to both of its nodes.
  double truss_safety = 2.0;
};

/// Assembled finite-element model: hexahedral matrix, truss network and posterior pressure facets.
struct FeModel {
  Mesh mesh;
  std::vector<Truss> trusses;
  std::vector<TrussLaw> truss_laws;        ///< one per truss, damage already applied
  std::vector<HexMaterial> hex_materials;  ///< one per hex, damage already applied
  std::vector<HexReference> hex_refs;
  std::vector<Facet> pressure_facets;
  std::vector<double> hex_damage;    ///< for output only
  std::vector<double> truss_damage;  ///< for output only
  HexTangentMode tangent_mode = HexTangentMode::Consistent;

  /// Precomputes reference data; materials and laws must already be filled in.
  void prepare(GaussRule rule = {});

  int dof_count() const { return 3 * mesh.node_count(); }

  /// Internal force vector T(x) (3N), and the tangent dT/dx when `k` is non-null.
  void internal_forces(const Eigen::Matrix3Xd& x, Eigen::VectorXd& t, SparseMatrix* k = nullptr) const;
  /// Follower pressure forces F(x) on the posterior facets, and dF/dx when `k` is non-null.
  void pressure_forces(const Eigen::Matrix3Xd& x, double iop, Eigen::VectorXd& f, SparseMatrix* k = nullptr) const;
  /// Diagonal lumped fictitious mass (3N) at the current state.
  Eigen::VectorXd fictitious_mass(const Eigen::Matrix3Xd& x, double dt, const MassSettings& s) const;

  /// Stored energy [N mm].
  double strain_energy(const Eigen::Matrix3Xd& x) const;
  /// J at every Gauss point of every hex.
  std::vector<double> gauss_jacobians(const Eigen::Matrix3Xd& x) const;
};

/// Equilibrium of an FeModel under a follower pressure and optional dead nodal loads.
class StructuralSystem : public NonlinearSystem {
 public:
  StructuralSystem(const FeModel& model, DofMap dofs, MassSettings mass = {});

  void set_pressure(double iop_mpa) { iop_ = iop_mpa; }
  double pressure() const { return iop_; }
  /// Dead loads (3N), scaled by `factor`.
  void set_dead_load(Eigen::VectorXd loads) { dead_ = std::move(loads); }
  void set_dead_load_factor(double factor) { dead_factor_ = factor; }

  const DofMap& dofs() const { return dofs_; }
  const FeModel& model() const { return model_; }
  Eigen::Matrix3Xd positions(const Eigen::VectorXd& q) const { return dofs_.positions(model_.mesh.nodes, q); }

  int size() const override { return dofs_.size(); }
  void forces(const Eigen::VectorXd& q, Eigen::VectorXd& internal, Eigen::VectorXd& external) override;
  SparseMatrix tangent(const Eigen::VectorXd& q) override;
  Eigen::VectorXd fictitious_mass(const Eigen::VectorXd& q, double dt) override;

 private:
  Eigen::VectorXd full_external(const Eigen::Matrix3Xd& x, SparseMatrix* k) const;

  const FeModel& model_;
  DofMap dofs_;
  MassSettings mass_;
  double iop_ = 0.0;
  Eigen::VectorXd dead_;
  double dead_factor_ = 1.0;
};

}  // namespace stroma
