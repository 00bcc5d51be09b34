#pragma once

#include "stroma/geometry.hpp"

#include <Eigen/Sparse>

#include <vector>

namespace stroma {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Map from generalized coordinates q to nodal positions x(q).
///
/// Every nodal component is either free (one coordinate), fixed at its
/// reference value, one half of an antisymmetric pair (x_a = X_a + w,
/// x_b = X_b - w), or part of a rigid column that rotates about a fixed pivot
/// and a fixed axis (one angle per column).
class DofMap {
 public:
  explicit DofMap(int n_nodes);

  void fix_node(int node);
  void fix_component(int node, int component);
  /// Nodes a and b move by opposite amounts, so their midpoint stays put.
  void add_antisymmetric_pair(int a, int b);
  /// The column rotates rigidly about `axis` through `pivot`.
  void add_rigid_column(const std::vector<int>& nodes, const Vec3& pivot, const Vec3& axis);

  /// Numbers the generalized coordinates; call once after all constraints are added.
  void finalize();

  int size() const { return n_q_; }
  int node_count() const { return n_nodes_; }
  bool is_fixed(int node, int component) const;

  Eigen::Matrix3Xd positions(const Eigen::Matrix3Xd& ref, const Eigen::VectorXd& q) const;

  /// dx/dq at the current positions (3N x n_q).
  SparseMatrix jacobian(const Eigen::Matrix3Xd& x) const;
  /// B^T f.
  Eigen::VectorXd reduce_vector(const Eigen::VectorXd& full, const Eigen::Matrix3Xd& x) const;
  /// B^T K B plus the rotation curvature term of the rigid columns, which uses the full residual r.
  SparseMatrix reduce_matrix(const SparseMatrix& full, const Eigen::Matrix3Xd& x, const Eigen::VectorXd& r) const;
  /// diag(B^T diag(m) B).
  Eigen::VectorXd reduce_diagonal(const Eigen::VectorXd& full, const Eigen::Matrix3Xd& x) const;

 private:
  struct RigidColumn {
    std::vector<int> nodes;
    Vec3 pivot;
    Vec3 axis;
    int q = -1;
  };
  enum class Kind { Free, Fixed, PairPlus, PairMinus, Rigid };

  int n_nodes_;
  int n_q_ = 0;
  bool finalized_ = false;
  std::vector<Kind> kind_;     // per full dof
  std::vector<int> index_;     // q index for linear kinds, partner dof for pairs before finalize
  std::vector<RigidColumn> columns_;
};

enum class LimbusMode { OrthogonalityPreserving, FixedAll, PinnedMidsurface };

/// Limbus support. The mid-surface point of a column is the midpoint of its two
/// central nodes (the node-layer count N_L + 1 is even).
///  - OrthogonalityPreserving: each column stays straight and rotates about the
///    circumferential tangent through its fixed mid-surface point.
///  - FixedAll: every limbus node is fixed.
///  - PinnedMidsurface: only the mid-surface point of each column is held; the
///    two central nodes move antisymmetrically and all other nodes are free.
DofMap apply_limbus_bc(const Mesh& mesh, LimbusMode mode);

}  // namespace stroma
