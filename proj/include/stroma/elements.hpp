#pragma once

#include "stroma/materials.hpp"
#include "stroma/variance_material.hpp"

#include <vector>

namespace stroma {

// ---------------------------------------------------------------------------
// Truss

struct TrussElementEval {
  Vec3 t_a = Vec3::Zero();  ///< internal force at node a [N]
  Vec3 t_b = Vec3::Zero();  ///< internal force at node b [N]
  Mat3 k_aa = Mat3::Zero(), k_ab = Mat3::Zero(), k_ba = Mat3::Zero(), k_bb = Mat3::Zero();  ///< [N/mm]
  double l = 0.0;       ///< current length [mm]
  double lambda = 1.0;  ///< l / L
  Vec3 n = Vec3::Zero();
  double alpha = 0.0;   ///< A(lambda) A / L [N/mm]
  double beta = 0.0;    ///< P(lambda) A / l [N/mm]
  double energy = 0.0;  ///< psi A L [N mm]
};

/// Total-Lagrangian two-node truss: T_b = P A n = -T_a and
/// K_aa = (alpha - beta) n (x) n + beta I with K_ab = K_ba = -K_aa, K_bb = K_aa.
TrussElementEval truss_eval(const Vec3& xa_ref, const Vec3& xb_ref, const Vec3& xa, const Vec3& xb,
                            const TrussLaw& law, double area);

// ---------------------------------------------------------------------------
// Trilinear hexahedron

using HexNodes = Eigen::Matrix<double, 8, 3>;
using HexVector = Eigen::Matrix<double, 24, 1>;
using HexMatrix = Eigen::Matrix<double, 24, 24>;

/// Gauss-Legendre points per direction (1, 2 or 3).
struct GaussRule {
  int order = 2;
};

/// Trilinear shape functions at natural coordinates; node order as in Hex::nodes.
Eigen::Matrix<double, 8, 1> hex_shape(const Vec3& xi);
Eigen::Matrix<double, 8, 3> hex_shape_derivatives(const Vec3& xi);

/// Reference-configuration data of one element, computed once.
struct HexReference {
  std::vector<Eigen::Matrix<double, 8, 3>> dn_dx;  ///< dN_a/dX_J at each Gauss point
  std::vector<double> weight;                      ///< w_g det(dX/dxi)
  double volume = 0.0;

  /// Throws InvertedElementError if det(dX/dxi) <= 0 at a Gauss point.
  static HexReference build(const HexNodes& ref, GaussRule rule = {}, int element = -1);
};

/// Constitution at a hex Gauss point: Mooney-Rivlin matrix plus optional dispersed families.
struct HexMaterial {
  MatrixParams matrix;
  std::vector<FamilyTensors> families;
};

/// First Piola-Kirchhoff stress and energy density of a HexMaterial.
template <class T>
Tensor2<T> material_piola(const Tensor2<T>& f, const HexMaterial& m, T& energy) {
  const IsochoricKinematics<T> kin(f);
  energy = matrix_energy(kin, m.matrix);
  Tensor2<T> p = matrix_piola(kin, m.matrix);
  for (const FamilyTensors& fam : m.families) {
    const VarianceTerms<T> v = variance_family(kin, fam);
    energy += v.energy;
    p += v.piola;
  }
  return p;
}

/// dP/dF as a 9x9 matrix indexed (3i+J, 3k+L), by forward-mode automatic differentiation.
Eigen::Matrix<double, 9, 9> material_tangent(const Mat3& f, const HexMaterial& m);

enum class HexTangentMode {
  Consistent,        ///< exact material tangent from forward AD
  FiniteDifference,  ///< central differences of the element force vector
};

struct HexElementEval {
  HexVector forces = HexVector::Zero();   ///< [N]
  HexMatrix tangent = HexMatrix::Zero();  ///< [N/mm], only when requested
  std::vector<double> gauss_j;
  std::vector<double> gauss_energy;  ///< energy density [MPa]
  double energy = 0.0;               ///< [N mm]
};

/// Internal forces (and optionally the tangent) of one hexahedron.
/// Throws InvertedElementError carrying `element` if J <= 0 at a Gauss point.
HexElementEval hex_eval(const HexReference& ref, const HexNodes& cur, const HexMaterial& material,
                        bool with_tangent = true, HexTangentMode mode = HexTangentMode::Consistent,
                        int element = -1);

/// Convenience overload for a bare Mooney-Rivlin element.
HexElementEval hex_eval(const HexNodes& ref, const HexNodes& cur, const MatrixParams& params,
                        GaussRule rule = {});

/// Row-summed consistent mass: m_a = int rho N_a dV.
Eigen::Matrix<double, 8, 1> hex_lumped_mass(const HexNodes& ref, double rho);

// ---------------------------------------------------------------------------
// Follower pressure on a bilinear facet

using FacetNodes = Eigen::Matrix<double, 4, 3>;

/// Equivalent nodal forces of a pressure acting on the current facet,
/// f_a = p int N_a (g1 x g2) dxi deta with 2x2 Gauss points. The force points along
/// (x1 - x0) x (x3 - x0). Throws DomainError for negative pressure or a degenerate facet.
FacetNodes pressure_nodal_forces(const FacetNodes& facet, double iop);

/// d f / d x of pressure_nodal_forces (load stiffness, not symmetric in general).
Eigen::Matrix<double, 12, 12> pressure_load_stiffness(const FacetNodes& facet, double iop);

}  // namespace stroma
