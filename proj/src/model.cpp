#include "stroma/model.hpp"

#include <algorithm>

namespace stroma {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

HexNodes gather_hex(const Eigen::Matrix3Xd& x, const Hex& h) {
  HexNodes c;
  for (int a = 0; a < 8; ++a) c.row(a) = x.col(h.nodes[a]).transpose();
  return c;
}

FacetNodes gather_facet(const Eigen::Matrix3Xd& x, const Facet& f) {
  FacetNodes c;
  for (int a = 0; a < 4; ++a) c.row(a) = x.col(f[a]).transpose();
  return c;
}

template <int N>
void scatter_block(Triplets& trips, const std::array<int, N>& nodes, const Eigen::Matrix<double, 3 * N, 3 * N>& k,
                   double sign = 1.0) {
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const double v = k(3 * a + i, 3 * b + j);
          if (v != 0.0) trips.emplace_back(3 * nodes[a] + i, 3 * nodes[b] + j, sign * v);
        }
}

}  // namespace

void FeModel::prepare(GaussRule rule) {
  if (static_cast<int>(hex_materials.size()) != mesh.hex_count()) throw Error("one HexMaterial per hex required");
  if (truss_laws.size() != trusses.size()) throw Error("one TrussLaw per truss required");
  hex_refs.clear();
  hex_refs.reserve(mesh.hexes.size());
  for (int h = 0; h < mesh.hex_count(); ++h) hex_refs.push_back(HexReference::build(mesh.hex_coords(h), rule, h));
  if (hex_damage.empty()) hex_damage.assign(mesh.hexes.size(), 0.0);
  if (truss_damage.empty()) truss_damage.assign(trusses.size(), 0.0);
}

void FeModel::internal_forces(const Eigen::Matrix3Xd& x, Eigen::VectorXd& t, SparseMatrix* k) const {
  t.setZero(dof_count());
  Triplets trips;
  if (k) trips.reserve(mesh.hexes.size() * 576 + trusses.size() * 36);

  for (int h = 0; h < mesh.hex_count(); ++h) {
    const Hex& hex = mesh.hexes[h];
    const HexElementEval e = hex_eval(hex_refs[h], gather_hex(x, hex), hex_materials[h], k != nullptr, tangent_mode, h);
    for (int a = 0; a < 8; ++a) t.segment<3>(3 * hex.nodes[a]) += e.forces.segment<3>(3 * a);
    if (k) scatter_block<8>(trips, hex.nodes, e.tangent);
  }

  const Eigen::Matrix3Xd& ref = mesh.nodes;
  for (std::size_t i = 0; i < trusses.size(); ++i) {
    const Truss& tr = trusses[i];
    const TrussElementEval e =
        truss_eval(ref.col(tr.node_a), ref.col(tr.node_b), x.col(tr.node_a), x.col(tr.node_b), truss_laws[i], tr.ref_area);
    t.segment<3>(3 * tr.node_a) += e.t_a;
    t.segment<3>(3 * tr.node_b) += e.t_b;
    if (k) {
      Eigen::Matrix<double, 6, 6> kt;
      kt << e.k_aa, e.k_ab, e.k_ba, e.k_bb;
      scatter_block<2>(trips, {tr.node_a, tr.node_b}, kt);
    }
  }
  if (k) {
    *k = SparseMatrix(dof_count(), dof_count());
    k->setFromTriplets(trips.begin(), trips.end());
  }
}

void FeModel::pressure_forces(const Eigen::Matrix3Xd& x, double iop, Eigen::VectorXd& f, SparseMatrix* k) const {
  f.setZero(dof_count());
  Triplets trips;
  for (const Facet& facet : pressure_facets) {
    const FacetNodes c = gather_facet(x, facet);
    const FacetNodes fn = pressure_nodal_forces(c, iop);
    for (int a = 0; a < 4; ++a) f.segment<3>(3 * facet[a]) += fn.row(a).transpose();
    if (k) scatter_block<4>(trips, facet, pressure_load_stiffness(c, iop));
  }
  if (k) {
    *k = SparseMatrix(dof_count(), dof_count());
    k->setFromTriplets(trips.begin(), trips.end());
  }
}

Eigen::VectorXd FeModel::fictitious_mass(const Eigen::Matrix3Xd& x, double dt, const MassSettings& s) const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(dof_count());
  for (int h = 0; h < mesh.hex_count(); ++h) {
    const Hex& hex = mesh.hexes[h];
    const HexNodes ref = mesh.hex_coords(h);
    const HexMaterial& mat = hex_materials[h];
    // Elastic estimate: P-wave modulus of the matrix, raised to the current
    // tangent row norm when fibril families stiffen the element.
    double e_mod = mat.matrix.k_bulk + 4.0 / 3.0 * std::abs(mat.matrix.shear_modulus());
    if (!mat.families.empty()) {
      const HexNodes cur = gather_hex(x, hex);
      const Mat3 f = cur.transpose() * hex_shape_derivatives(Vec3::Zero()) *
                     (ref.transpose() * hex_shape_derivatives(Vec3::Zero())).inverse();
      e_mod = std::max(e_mod, material_tangent(f, mat).cwiseAbs().rowwise().sum().maxCoeff());
    }
    double h_min = std::numeric_limits<double>::infinity();
    static constexpr int kEdges[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                          {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};
    for (const auto& e : kEdges) h_min = std::min(h_min, (ref.row(e[0]) - ref.row(e[1])).norm());
    const double rho = s.hex_safety * element_density(e_mod, h_min, dt);
    const Eigen::Matrix<double, 8, 1> mn = hex_lumped_mass(ref, rho);
    for (int a = 0; a < 8; ++a) m.segment<3>(3 * hex.nodes[a]).array() += mn(a);
  }
  const Eigen::Matrix3Xd& ref = mesh.nodes;
  for (std::size_t i = 0; i < trusses.size(); ++i) {
    const Truss& tr = trusses[i];
    const TrussElementEval e =
        truss_eval(ref.col(tr.node_a), ref.col(tr.node_b), x.col(tr.node_a), x.col(tr.node_b), truss_laws[i], tr.ref_area);
    const double add = s.truss_safety * std::max(e.alpha, std::abs(e.beta)) * dt * dt / 2.0;
    m.segment<3>(3 * tr.node_a).array() += add;
    m.segment<3>(3 * tr.node_b).array() += add;
  }
  return m;
}

double FeModel::strain_energy(const Eigen::Matrix3Xd& x) const {
  double w = 0.0;
  for (int h = 0; h < mesh.hex_count(); ++h) {
    w += hex_eval(hex_refs[h], gather_hex(x, mesh.hexes[h]), hex_materials[h], false, tangent_mode, h).energy;
  }
  const Eigen::Matrix3Xd& ref = mesh.nodes;
  for (std::size_t i = 0; i < trusses.size(); ++i) {
    const Truss& tr = trusses[i];
    w += truss_eval(ref.col(tr.node_a), ref.col(tr.node_b), x.col(tr.node_a), x.col(tr.node_b), truss_laws[i],
                    tr.ref_area)
             .energy;
  }
  return w;
}

std::vector<double> FeModel::gauss_jacobians(const Eigen::Matrix3Xd& x) const {
  std::vector<double> out;
  for (int h = 0; h < mesh.hex_count(); ++h) {
    const HexNodes cur = gather_hex(x, mesh.hexes[h]);
    for (const auto& dn : hex_refs[h].dn_dx) out.push_back((cur.transpose() * dn).determinant());
  }
  return out;
}

StructuralSystem::StructuralSystem(const FeModel& model, DofMap dofs, MassSettings mass)
    : model_(model), dofs_(std::move(dofs)), mass_(mass) {
  if (dofs_.node_count() != model_.mesh.node_count()) throw Error("DofMap does not match the model");
  dofs_.finalize();
}

Eigen::VectorXd StructuralSystem::full_external(const Eigen::Matrix3Xd& x, SparseMatrix* k) const {
  Eigen::VectorXd f;
  model_.pressure_forces(x, iop_, f, k);
  if (dead_.size() == f.size()) f += dead_factor_ * dead_;
  return f;
}

void StructuralSystem::forces(const Eigen::VectorXd& q, Eigen::VectorXd& internal, Eigen::VectorXd& external) {
  const Eigen::Matrix3Xd x = positions(q);
  Eigen::VectorXd t;
  model_.internal_forces(x, t);
  const Eigen::VectorXd f = full_external(x, nullptr);
  const SparseMatrix b = dofs_.jacobian(x);
  internal = b.transpose() * t;
  external = b.transpose() * f;
}

SparseMatrix StructuralSystem::tangent(const Eigen::VectorXd& q) {
  const Eigen::Matrix3Xd x = positions(q);
  Eigen::VectorXd t;
  SparseMatrix kt, kp;
  model_.internal_forces(x, t, &kt);
  const Eigen::VectorXd f = full_external(x, &kp);
  const SparseMatrix full = kt - kp;
  return dofs_.reduce_matrix(full, x, t - f);
}

Eigen::VectorXd StructuralSystem::fictitious_mass(const Eigen::VectorXd& q, double dt) {
  const Eigen::Matrix3Xd x = positions(q);
  return dofs_.reduce_diagonal(model_.fictitious_mass(x, dt, mass_), x);
}

}  // namespace stroma
