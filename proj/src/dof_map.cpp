#include "stroma/dof_map.hpp"

#include <Eigen/Geometry>

namespace stroma {

DofMap::DofMap(int n_nodes)
    : n_nodes_(n_nodes), kind_(3 * n_nodes, Kind::Free), index_(3 * n_nodes, -1) {}

void DofMap::fix_node(int node) {
  for (int c = 0; c < 3; ++c) fix_component(node, c);
}

void DofMap::fix_component(int node, int component) {
  if (finalized_) throw Error("DofMap already finalized");
  const int d = 3 * node + component;
  if (kind_[d] != Kind::Free && kind_[d] != Kind::Fixed) throw MeshError("conflicting constraints on node " + std::to_string(node));
  kind_[d] = Kind::Fixed;
}

void DofMap::add_antisymmetric_pair(int a, int b) {
  if (finalized_) throw Error("DofMap already finalized");
  for (int c = 0; c < 3; ++c) {
    const int da = 3 * a + c, db = 3 * b + c;
    if (kind_[da] != Kind::Free || kind_[db] != Kind::Free) {
      throw MeshError("conflicting constraints on nodes " + std::to_string(a) + ", " + std::to_string(b));
    }
    kind_[da] = Kind::PairPlus;
    kind_[db] = Kind::PairMinus;
    index_[da] = db;
  }
}

void DofMap::add_rigid_column(const std::vector<int>& nodes, const Vec3& pivot, const Vec3& axis) {
  if (finalized_) throw Error("DofMap already finalized");
  for (int n : nodes)
    for (int c = 0; c < 3; ++c) {
      if (kind_[3 * n + c] != Kind::Free) throw MeshError("conflicting constraints on node " + std::to_string(n));
      kind_[3 * n + c] = Kind::Rigid;
    }
  columns_.push_back({nodes, pivot, axis.normalized(), -1});
}

void DofMap::finalize() {
  if (finalized_) return;
  int q = 0;
  for (std::size_t d = 0; d < kind_.size(); ++d) {
    if (kind_[d] == Kind::Free) {
      index_[d] = q++;
    } else if (kind_[d] == Kind::PairPlus) {
      index_[index_[d]] = q;
      index_[d] = q++;
    }
  }
  for (RigidColumn& c : columns_) c.q = q++;
  n_q_ = q;
  finalized_ = true;
}

bool DofMap::is_fixed(int node, int component) const { return kind_[3 * node + component] == Kind::Fixed; }

Eigen::Matrix3Xd DofMap::positions(const Eigen::Matrix3Xd& ref, const Eigen::VectorXd& q) const {
  if (!finalized_) throw Error("DofMap not finalized");
  Eigen::Matrix3Xd x = ref;
  for (int d = 0; d < 3 * n_nodes_; ++d) {
    switch (kind_[d]) {
      case Kind::Free:
      case Kind::PairPlus: x(d % 3, d / 3) += q(index_[d]); break;
      case Kind::PairMinus: x(d % 3, d / 3) -= q(index_[d]); break;
      default: break;
    }
  }
  for (const RigidColumn& c : columns_) {
    const Mat3 r = Eigen::AngleAxisd(q(c.q), c.axis).toRotationMatrix();
    for (int n : c.nodes) x.col(n) = c.pivot + r * (ref.col(n) - c.pivot);
  }
  return x;
}

SparseMatrix DofMap::jacobian(const Eigen::Matrix3Xd& x) const {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(3 * n_nodes_);
  for (int d = 0; d < 3 * n_nodes_; ++d) {
    switch (kind_[d]) {
      case Kind::Free:
      case Kind::PairPlus: trips.emplace_back(d, index_[d], 1.0); break;
      case Kind::PairMinus: trips.emplace_back(d, index_[d], -1.0); break;
      default: break;
    }
  }
  for (const RigidColumn& c : columns_)
    for (int n : c.nodes) {
      const Vec3 dx = c.axis.cross(x.col(n) - c.pivot);
      for (int i = 0; i < 3; ++i) trips.emplace_back(3 * n + i, c.q, dx(i));
    }
  SparseMatrix b(3 * n_nodes_, n_q_);
  b.setFromTriplets(trips.begin(), trips.end());
  return b;
}

Eigen::VectorXd DofMap::reduce_vector(const Eigen::VectorXd& full, const Eigen::Matrix3Xd& x) const {
  return jacobian(x).transpose() * full;
}

SparseMatrix DofMap::reduce_matrix(const SparseMatrix& full, const Eigen::Matrix3Xd& x, const Eigen::VectorXd& r) const {
  const SparseMatrix b = jacobian(x);
  SparseMatrix k = SparseMatrix(b.transpose()) * full * b;
  for (const RigidColumn& c : columns_) {
    double g = 0.0;
    for (int n : c.nodes) g += r.segment<3>(3 * n).dot(c.axis.cross(c.axis.cross(x.col(n) - c.pivot)));
    k.coeffRef(c.q, c.q) += g;
  }
  return k;
}

Eigen::VectorXd DofMap::reduce_diagonal(const Eigen::VectorXd& full, const Eigen::Matrix3Xd& x) const {
  const SparseMatrix b = jacobian(x);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_q_);
  for (int col = 0; col < b.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(b, col); it; ++it) out(col) += full(it.row()) * it.value() * it.value();
  return out;
}

DofMap apply_limbus_bc(const Mesh& mesh, LimbusMode mode) {
  DofMap map(mesh.node_count());
  for (const std::vector<int>& column : mesh.limbus_columns) {
    if (column.size() < 2 || column.size() % 2 != 0) {
      throw MeshError("limbus column without a mid-surface node pair");
    }
    const std::size_t upper = column.size() / 2;
    const int a = column[upper - 1];
    const int b = column[upper];
    switch (mode) {
      case LimbusMode::FixedAll:
        for (int n : column) map.fix_node(n);
        break;
      case LimbusMode::PinnedMidsurface:
        map.add_antisymmetric_pair(a, b);
        break;
      case LimbusMode::OrthogonalityPreserving: {
        const Vec3 pivot = 0.5 * (mesh.node(a) + mesh.node(b));
        const Vec3 tangent(-pivot.y(), pivot.x(), 0.0);
        if (tangent.norm() == 0.0) throw MeshError("limbus column on the optic axis");
        map.add_rigid_column(column, pivot, tangent);
        break;
      }
    }
  }
  map.finalize();
  return map;
}

}  // namespace stroma
